#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

#include "torquescore/errors.hpp"
#include "torquescore/perturbation.hpp"

namespace torquescore {

inline constexpr double kVarianceFloor = 1e-20;
inline constexpr double kAbsoluteSigmaFloor = 1e-300;

/// Component weights of the final score. d2 enters negatively by default:
/// smaller joint-wise variance signifies higher difficulty.
struct DiversityWeights {
  double w1 = 1.0;
  double w2 = -1.0;
  double w3 = 1.0;

  void validate() const {
    if (!std::isfinite(w1) || !std::isfinite(w2) || !std::isfinite(w3))
      throw ValidationError("weights must be finite");
    if (w1 == 0.0 && w2 == 0.0 && w3 == 0.0)
      throw ValidationError("weights must not all be zero");
  }
};

struct DifficultyBreakdown {
  double d1 = 0.0;       // spectral diversity
  double d2 = 0.0;       // variance diversity
  double d3 = 0.0;       // segment diversity
  double mds = 0.0;
  double degenerate_fraction = 0.0;
  int K = 1;             // segment count used for d3
  bool floored = false;  // some singular value or variance hit its floor
};

struct SpectralOptions {
  double floor_ratio = 1e-12;
  // Opt-in variant: sum per-frame spectral diversities instead of one SVD
  // over the stacked matrix.
  bool per_frame_sum = false;
};

namespace detail {

inline double log_singular_sum(const Eigen::MatrixXd& a, double floor_ratio,
                               bool* floored) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int r = static_cast<int>(sv.size());
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  if (top <= 0.0) {
    if (floored) *floored = true;
    return r * std::log(kAbsoluteSigmaFloor);
  }
  const double floor = floor_ratio * top;
  double sum = 0.0;
  for (int i = 0; i < r; ++i) {
    const double s = std::max(sv[i], floor);
    if (sv[i] < floor && floored) *floored = true;
    sum += std::log(s);
  }
  return sum;
}

}  // namespace detail

/// d1 = sum of log singular values of the stacked Jacobian,
/// r = min(t, J*D). Values below floor_ratio * sigma_1 are clamped before
/// the log so rank-deficient stacks stay finite.
inline double spectral_diversity(const StackedJacobian& stack,
                                 double floor_ratio = 1e-12,
                                 bool* floored = nullptr) {
  if (stack.matrix.rows() == 0 || stack.matrix.cols() == 0)
    throw EmptyStack("spectral_diversity: empty stack");
  if (!stack.matrix.allFinite())
    throw ValidationError("spectral_diversity: non-finite entries");
  return detail::log_singular_sum(stack.matrix, floor_ratio, floored);
}

/// Per-frame variant: sum over frames of the log-singular-value sum of each
/// frame Jacobian (the Gram-determinant route). Degenerate frames are
/// skipped.
inline double spectral_diversity_per_frame(
    const std::vector<FrameJacobian>& frames, double floor_ratio = 1e-12,
    bool* floored = nullptr) {
  if (frames.empty()) throw EmptyStack("spectral_diversity: no frames");
  double sum = 0.0;
  for (const auto& f : frames) {
    if (f.degenerate) continue;
    sum += detail::log_singular_sum(f.matrix, floor_ratio, floored);
  }
  return sum;
}

/// d2 = sum over joints of log variance of Jacobian entries pooled over all
/// non-degenerate frames and all perturbation directions.
inline double variance_diversity(const std::vector<FrameJacobian>& frames,
                                 bool* floored = nullptr) {
  int live = 0;
  for (const auto& f : frames) live += f.degenerate ? 0 : 1;
  if (live == 0) throw AllDegenerate("variance_diversity: no usable frames");
  const int nj = static_cast<int>(frames.front().matrix.rows());
  const int d = static_cast<int>(frames.front().matrix.cols());
  double d2 = 0.0;
  for (int j = 0; j < nj; ++j) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& f : frames) {
      if (f.degenerate) continue;
      sum += f.matrix.row(j).sum();
      sum_sq += f.matrix.row(j).squaredNorm();
    }
    const double count = static_cast<double>(live) * d;
    const double mean = sum / count;
    double var = sum_sq / count - mean * mean;
    if (var < kVarianceFloor) {
      var = kVarianceFloor;
      if (floored) *floored = true;
    }
    d2 += std::log(var);
  }
  return d2;
}

/// Contiguous segment boundaries: sizes floor(t/K) or ceil(t/K), remainder
/// handed to the earliest segments. Returns K+1 offsets.
inline std::vector<int> segment_offsets(int t, int k) {
  std::vector<int> offsets(k + 1, 0);
  const int base = t / k;
  const int extra = t % k;
  for (int i = 0; i < k; ++i)
    offsets[i + 1] = offsets[i] + base + (i < extra ? 1 : 0);
  return offsets;
}

/// d3 = mean spectral diversity over K contiguous temporal segments.
inline double segment_diversity(const StackedJacobian& stack, int k = 4,
                                double floor_ratio = 1e-12,
                                bool* floored = nullptr) {
  const int t = stack.frame_count();
  if (k < 1) throw ValidationError("segment count must be >= 1");
  if (t < 2 * k)
    throw TooShort("segment_diversity needs at least 2 frames per segment");
  const std::vector<int> offsets = segment_offsets(t, k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    StackedJacobian seg;
    seg.matrix = stack.matrix.middleRows(offsets[i], offsets[i + 1] - offsets[i]);
    sum += spectral_diversity(seg, floor_ratio, floored);
  }
  return sum / k;
}

/// Aggregate the three components: mds = w1 d1 + w2 d2 + w3 d3.
inline DifficultyBreakdown compute_mds(const StackedJacobian& stack,
                                       const std::vector<FrameJacobian>& frames,
                                       const DiversityWeights& weights = {},
                                       int k = 4,
                                       const SpectralOptions& opts = {}) {
  weights.validate();
  if (static_cast<size_t>(stack.frame_count()) != frames.size())
    throw DimensionMismatch("compute_mds: stack and frame list disagree");
  DifficultyBreakdown out;
  out.K = k;
  out.degenerate_fraction = stack.degenerate_fraction();
  if (opts.per_frame_sum)
    out.d1 = spectral_diversity_per_frame(frames, opts.floor_ratio, &out.floored);
  else
    out.d1 = spectral_diversity(stack, opts.floor_ratio, &out.floored);
  out.d2 = variance_diversity(frames, &out.floored);
  out.d3 = segment_diversity(stack, k, opts.floor_ratio, &out.floored);
  out.mds = weights.w1 * out.d1 + weights.w2 * out.d2 + weights.w3 * out.d3;
  return out;
}

}  // namespace torquescore
