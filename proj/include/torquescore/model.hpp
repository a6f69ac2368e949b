#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "torquescore/errors.hpp"
#include "torquescore/version.hpp"

namespace torquescore {

inline constexpr int kRootParent = -1;

/// One joint of the articulated tree. Every joint carries 3 rotational
/// degrees of freedom (intrinsic X-Y-Z Euler angles); the root additionally
/// owns the 3 translational DoF of the floating base.
struct JointSpec {
  std::string name;
  int parent = kRootParent;           // index into KinematicModel::joints
  Eigen::Vector3d offset;             // joint position in parent frame (m)
  double mass = 0.0;                  // kg
  Eigen::Matrix3d inertia;            // about COM, in joint frame (kg m^2)
  Eigen::Vector3d com;                // center of mass in joint frame (m)
};

struct KinematicModel {
  std::vector<JointSpec> joints;      // root first, topologically sorted
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};

  int joint_count() const { return static_cast<int>(joints.size()); }
  int dof() const { return 3 + 3 * joint_count(); }

  double total_mass() const {
    double m = 0.0;
    for (const auto& j : joints) m += j.mass;
    return m;
  }
};

inline void validate_model(const KinematicModel& model) {
  if (model.joints.empty())
    throw ValidationError("model has no joints");
  for (int i = 0; i < model.joint_count(); ++i) {
    const JointSpec& j = model.joints[i];
    if (i == 0) {
      if (j.parent != kRootParent)
        throw ValidationError("joint 0 (" + j.name + ") must be the root");
    } else {
      if (j.parent == kRootParent)
        throw ValidationError("joint " + j.name +
                              ": exactly one root allowed");
      if (j.parent < 0 || j.parent >= i)
        throw ValidationError("joint " + j.name +
                              ": parent must precede it in topological order");
    }
    if (j.mass < 0.0)
      throw ValidationError("joint " + j.name + ": mass must be >= 0");
    if (!j.offset.allFinite() || !j.com.allFinite() || !j.inertia.allFinite())
      throw ValidationError("joint " + j.name + ": non-finite parameters");
    const double asym = (j.inertia - j.inertia.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
      throw ValidationError("joint " + j.name + ": inertia not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(j.inertia);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw ValidationError("joint " + j.name +
                            ": inertia not positive semi-definite");
  }
}

inline KinematicModel load_model(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(origin + ": empty file");
  if (line != kModelFormat)
    throw ParseError(origin + ": bad header, expected '" +
                     std::string(kModelFormat) + "'");

  KinematicModel model;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    JointSpec j;
    if (!(ls >> j.name)) continue;  // blank line
    double ox, oy, oz, cx, cy, cz, ixx, iyy, izz, ixy, ixz, iyz;
    if (!(ls >> j.parent >> ox >> oy >> oz >> j.mass >> cx >> cy >> cz >>
          ixx >> iyy >> izz >> ixy >> ixz >> iyz))
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": malformed joint record");
    j.offset << ox, oy, oz;
    j.com << cx, cy, cz;
    j.inertia << ixx, ixy, ixz,
                 ixy, iyy, iyz,
                 ixz, iyz, izz;
    model.joints.push_back(std::move(j));
  }
  validate_model(model);
  return model;
}

inline KinematicModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open model file: " + path);
  return load_model(in, path);
}

}  // namespace torquescore
