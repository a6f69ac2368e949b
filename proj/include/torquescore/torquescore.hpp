#pragma once

#include "torquescore/analysis.hpp"
#include "torquescore/csv.hpp"
#include "torquescore/difficulty.hpp"
#include "torquescore/errors.hpp"
#include "torquescore/model.hpp"
#include "torquescore/motion.hpp"
#include "torquescore/parallel.hpp"
#include "torquescore/perturbation.hpp"
#include "torquescore/pipeline.hpp"
#include "torquescore/rigidbody.hpp"
#include "torquescore/version.hpp"
