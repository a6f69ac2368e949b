#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "torquescore/difficulty.hpp"
#include "torquescore/motion.hpp"
#include "torquescore/perturbation.hpp"
#include "torquescore/version.hpp"

namespace torquescore {

/// Effective run configuration; serialized verbatim into output headers so
/// every run is reproducible from its artifacts.
struct RunConfig {
  std::string model_path;
  DiversityWeights weights;
  double eps = 1e-4;
  int segment_count = 4;
  int clip_len = 100;
  int stride = 0;            // 0 = clip_len
  double target_fps = 0.0;   // 0 = keep source fps
  double floor_ratio = 1e-12;
  double norm_smoothing = 1e-8;
  int threads = 1;
  bool no_partition = false;
  bool theta_only = false;
  bool per_frame_spectral = false;

  PerturbationConfig perturbation(double fps) const {
    PerturbationConfig cfg = PerturbationConfig::for_fps(fps, eps);
    cfg.norm_smoothing = norm_smoothing;
    cfg.singular_floor = floor_ratio;
    cfg.theta_only = theta_only;
    return cfg;
  }

  std::string echo() const {
    std::ostringstream os;
    os << "tool_version=" << kToolVersion << " model=" << model_path
       << " weights=" << weights.w1 << "," << weights.w2 << "," << weights.w3
       << " eps=" << eps << " K=" << segment_count << " clip_len=" << clip_len
       << " stride=" << (stride == 0 ? clip_len : stride)
       << " floor_ratio=" << floor_ratio
       << " norm_smoothing=" << norm_smoothing << " threads=" << threads
       << " theta_only=" << (theta_only ? 1 : 0)
       << " per_frame_spectral=" << (per_frame_spectral ? 1 : 0);
    return os.str();
  }
};

struct ClipScore {
  std::string clip_id;
  std::string source_id;
  int start_frame = 0;
  int t = 0;
  int joints = 0;
  int directions = 0;   // D = 3N
  DifficultyBreakdown breakdown;
};

/// Score one clip: perturbation Jacobians, then the three diversity
/// components. Frame-level parallelism via num_threads.
inline ClipScore score_clip(const KinematicModel& model, const Clip& clip,
                            const RunConfig& cfg, int num_threads = 1) {
  const PerturbationConfig pcfg = cfg.perturbation(clip.motion.fps);
  const StackedJacobian stack =
      sequence_jacobians(model, clip, pcfg, num_threads);
  const std::vector<FrameJacobian> frames = unstack(stack, model.joint_count());
  SpectralOptions opts;
  opts.floor_ratio = cfg.floor_ratio;
  opts.per_frame_sum = cfg.per_frame_spectral;
  ClipScore score;
  score.clip_id = clip.clip_id();
  score.source_id = clip.source_id;
  score.start_frame = clip.start_frame;
  score.t = clip.motion.frame_count();
  score.joints = model.joint_count();
  score.directions = 3 * model.dof();
  score.breakdown =
      compute_mds(stack, frames, cfg.weights, cfg.segment_count, opts);
  return score;
}

/// Prepare a sequence for scoring: optional resample, derivative
/// estimation, then partitioning (or one whole-sequence clip).
inline std::vector<Clip> prepare_clips(const MotionSequence& raw,
                                       const RunConfig& cfg) {
  MotionSequence seq = raw;
  if (cfg.target_fps > 0.0 && cfg.target_fps != seq.fps)
    seq = resample(seq, cfg.target_fps);
  if (!seq.has_derivatives()) seq = estimate_derivatives(seq);
  if (cfg.no_partition) {
    Clip whole;
    whole.source_id = seq.source_id;
    whole.start_frame = 0;
    whole.motion = seq;
    return {whole};
  }
  return partition_clips(seq, cfg.clip_len, cfg.stride);
}

}  // namespace torquescore
