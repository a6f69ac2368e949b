#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "torquescore/errors.hpp"
#include "torquescore/motion.hpp"
#include "torquescore/rigidbody.hpp"

namespace torquescore {

struct ScoredRecord {
  std::string clip_id;
  double mds = 0.0;
  double error = 0.0;   // mm, MPJPE-G
};

struct MidResult {
  double threshold = 0.0;
  double mu_low = 0.0;
  double mu_high = 0.0;
  double gap = 0.0;
  int low_count = 0;
  int high_count = 0;
};

struct CorrelationReport {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  double kendall_tau = 0.0;
  int n = 0;
};

/// Mean per-joint position error between two sequences' global joint
/// positions, in millimeters. No alignment.
inline double mpjpe_g(const KinematicModel& model,
                      const MotionSequence& reference,
                      const MotionSequence& tracked) {
  if (reference.frame_count() != tracked.frame_count())
    throw LengthMismatch("mpjpe: sequences differ in length");
  const int t = reference.frame_count();
  const int nj = model.joint_count();
  double sum = 0.0;
  for (int i = 0; i < t; ++i) {
    const auto fk_ref = forward_kinematics(model, reference.frames[i]);
    const auto fk_trk = forward_kinematics(model, tracked.frames[i]);
    for (int j = 0; j < nj; ++j)
      sum += (fk_ref.positions[j] - fk_trk.positions[j]).norm();
  }
  return sum / (static_cast<double>(t) * nj) * 1000.0;
}

/// Root-aligned variant: per-frame root translation difference is removed
/// before measuring.
inline double mpjpe_l(const KinematicModel& model,
                      const MotionSequence& reference,
                      const MotionSequence& tracked) {
  if (reference.frame_count() != tracked.frame_count())
    throw LengthMismatch("mpjpe: sequences differ in length");
  const int t = reference.frame_count();
  const int nj = model.joint_count();
  double sum = 0.0;
  for (int i = 0; i < t; ++i) {
    const auto fk_ref = forward_kinematics(model, reference.frames[i]);
    const auto fk_trk = forward_kinematics(model, tracked.frames[i]);
    const Eigen::Vector3d shift = fk_trk.positions[0] - fk_ref.positions[0];
    for (int j = 0; j < nj; ++j)
      sum += (fk_ref.positions[j] - (fk_trk.positions[j] - shift)).norm();
  }
  return sum / (static_cast<double>(t) * nj) * 1000.0;
}

/// Maximum Imitable Difficulty: the threshold c over observed unique MDS
/// values (excluding the maximum, so the high partition is nonempty) that
/// maximizes mu_high(c) - mu_low(c) with D_low = {MDS <= c},
/// D_high = {MDS > c}. Ties break toward the smallest c. Prefix-sum scan,
/// equal to the naive split enumeration.
inline MidResult mid(std::vector<ScoredRecord> records, int min_partition = 1) {
  if (min_partition < 1) throw ValidationError("min_partition must be >= 1");
  if (static_cast<int>(records.size()) < 2 * min_partition)
    throw TooFewRecords("mid needs at least " +
                        std::to_string(2 * min_partition) + " records");
  std::sort(records.begin(), records.end(),
            [](const ScoredRecord& a, const ScoredRecord& b) {
              return a.mds < b.mds;
            });
  const int n = static_cast<int>(records.size());
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + records[i].error;

  MidResult best;
  bool found = false;
  for (int i = 0; i < n - 1; ++i) {
    if (records[i + 1].mds == records[i].mds) continue;  // not a unique cut
    const double c = records[i].mds;
    const int low = i + 1, high = n - low;
    if (low < min_partition || high < min_partition) continue;
    const double mu_low = prefix[low] / low;
    const double mu_high = (prefix[n] - prefix[low]) / high;
    const double gap = mu_high - mu_low;
    if (!found || gap > best.gap) {
      best = {c, mu_low, mu_high, gap, low, high};
      found = true;
    }
  }
  if (!found)
    throw TooFewRecords("mid: no admissible split (all MDS values equal?)");
  return best;
}

/// Difficulty-Stratified Joint Error: mean error over records with MDS
/// strictly below c.
inline double dsje(const std::vector<ScoredRecord>& records, double c) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (r.mds < c) {
      sum += r.error;
      ++n;
    }
  }
  if (n == 0)
    throw EmptyStratum("dsje: no records with MDS < " + std::to_string(c));
  return sum / n;
}

namespace detail {

/// Average ranks (1-based) with ties sharing the mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = (i + j) / 2.0 + 1.0;
    for (int k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateVariance("pearson: constant input column");
  // (sxy/sxx) * sqrt(sxx/syy) rather than sxy/sqrt(sxx*syy): when the
  // columns are bitwise equal (or negated) both factors are exact, so
  // perfectly correlated inputs come out as exactly +-1.
  return (sxy / sxx) * std::sqrt(sxx / syy);
}

/// Merge-sort swap count for Kendall's tau (Knight's algorithm).
inline long long merge_count(std::vector<double>& v, std::vector<double>& tmp,
                             int lo, int hi) {
  if (hi - lo < 2) return 0;
  const int mid = (lo + hi) / 2;
  long long swaps = merge_count(v, tmp, lo, mid) + merge_count(v, tmp, mid, hi);
  int a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      swaps += mid - a;
      tmp[out++] = v[b++];
    } else {
      tmp[out++] = v[a++];
    }
  }
  while (a < mid) tmp[out++] = v[a++];
  while (b < hi) tmp[out++] = v[b++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return swaps;
}

inline long long tie_pairs(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  long long total = 0;
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
    const long long run = static_cast<long long>(j - i + 1);
    total += run * (run - 1) / 2;
    i = j + 1;
  }
  return total;
}

/// Kendall tau-b in O(n log n): sort by (x, y), count y-inversions by merge
/// sort, correct for ties in x, y, and joint (x, y).
inline double kendall_tau_b(const std::vector<double>& x,
                            const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });
  std::vector<double> ys(n);
  for (int i = 0; i < n; ++i) ys[i] = y[idx[i]];

  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  const long long n1 = tie_pairs(x);
  const long long n2 = tie_pairs(y);
  long long n3 = 0;  // pairs tied in both
  {
    int i = 0;
    while (i < n) {
      int j = i;
      while (j + 1 < n && x[idx[j + 1]] == x[idx[i]] && ys[j + 1] == ys[i]) ++j;
      // runs of equal (x, y); ys within an x-run are sorted so equal pairs
      // are adjacent
      const long long run = j - i + 1;
      n3 += run * (run - 1) / 2;
      i = j + 1;
    }
  }
  std::vector<double> tmp(n);
  const long long swaps = merge_count(ys, tmp, 0, n);
  const long long concordant_minus_discordant = n0 - n1 - n2 + n3 - 2 * swaps;
  // One sqrt of the exact integer product: for tie-free perfectly sorted or
  // reversed input the product is a perfect square, so the result is
  // exactly +-1.
  const double product =
      static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2);
  if (product == 0.0)
    throw DegenerateVariance("kendall: constant input column");
  return static_cast<double>(concordant_minus_discordant) / std::sqrt(product);
}

}  // namespace detail

/// Pearson, Spearman (average ranks), and Kendall tau-b over the
/// (mds, error) columns.
inline CorrelationReport correlations(const std::vector<ScoredRecord>& records) {
  const int n = static_cast<int>(records.size());
  if (n < 2) throw TooFewRecords("correlations need n >= 2");
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = records[i].mds;
    y[i] = records[i].error;
  }
  CorrelationReport rep;
  rep.n = n;
  rep.pearson_r = detail::pearson(x, y);
  rep.spearman_rho =
      detail::pearson(detail::average_ranks(x), detail::average_ranks(y));
  rep.kendall_tau = detail::kendall_tau_b(x, y);
  return rep;
}

struct CalibrationResult {
  double w1 = 0.0, w2 = 0.0, w3 = 0.0;
  double spearman = 0.0;
  bool low_confidence = false;   // best rho below 0.2
};

struct ComponentRow {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

/// Exhaustive grid search for the weight triple maximizing Spearman rho
/// between w . d and the error column. Ties break toward smaller l1 norm,
/// then lexicographic (w1, w2, w3).
inline CalibrationResult calibrate_weights(
    const std::vector<ComponentRow>& components,
    const std::vector<double>& errors, const std::vector<double>& grid) {
  if (components.size() != errors.size())
    throw LengthMismatch("calibrate: component and error counts differ");
  if (components.size() < 10)
    throw TooFewRecords("calibrate needs at least 10 matched rows");
  if (grid.empty()) throw ValidationError("calibrate: empty grid");

  const int n = static_cast<int>(components.size());
  const std::vector<double> error_ranks = detail::average_ranks(errors);
  std::vector<double> score(n);
  CalibrationResult best;
  bool found = false;
  for (double w1 : grid)
    for (double w2 : grid)
      for (double w3 : grid) {
        if (w1 == 0.0 && w2 == 0.0 && w3 == 0.0) continue;
        for (int i = 0; i < n; ++i)
          score[i] = w1 * components[i].d1 + w2 * components[i].d2 +
                     w3 * components[i].d3;
        double rho;
        try {
          rho = detail::pearson(detail::average_ranks(score), error_ranks);
        } catch (const DegenerateVariance&) {
          continue;  // constant score under these weights
        }
        const double l1 = std::abs(w1) + std::abs(w2) + std::abs(w3);
        const double best_l1 =
            std::abs(best.w1) + std::abs(best.w2) + std::abs(best.w3);
        const bool better =
            !found || rho > best.spearman ||
            (rho == best.spearman &&
             (l1 < best_l1 ||
              (l1 == best_l1 &&
               std::tie(w1, w2, w3) < std::tie(best.w1, best.w2, best.w3))));
        if (better) {
          best.w1 = w1;
          best.w2 = w2;
          best.w3 = w3;
          best.spearman = rho;
          found = true;
        }
      }
  if (!found)
    throw DegenerateVariance("calibrate: no weight triple gave a usable score");
  best.low_confidence = best.spearman < 0.2;
  return best;
}

}  // namespace torquescore
