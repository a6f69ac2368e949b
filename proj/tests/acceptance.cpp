// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Runs standalone (no test framework) so the output reads
// as a checklist.

#include <torquescore/torquescore.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace torquescore;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-28s %s\n", ok ? "PASS" : "FAIL", criterion,
              name, detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

GeneralizedState random_state(std::mt19937& rng, int n, double sq, double sv,
                              double sa) {
  return {ts_test::random_vector(rng, n, sq), ts_test::random_vector(rng, n, sv),
          ts_test::random_vector(rng, n, sa)};
}

// ---------------------------------------------------------------- 1: oracles

void criterion_1() {
  const auto t0 = Clock::now();
  const auto pend = ts_test::pendulum1();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> angle(-1.4, 1.4);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    GeneralizedState s{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6),
                       Eigen::VectorXd::Zero(6)};
    s.q[3] = angle(rng);
    const double tau = inverse_dynamics(pend, s)[3];
    const double expect = 9.81 * std::sin(s.q[3]);
    worst = std::max(worst, std::abs(tau - expect) / (1.0 + std::abs(expect)));
  }
  const bool single_ok = worst < 1e-8;

  const auto dbl = ts_test::pendulum2();
  const ts_test::DoublePendulumOracle oracle{1.2, 0.9, 0.7, 0.6};
  double worst2 = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto s = random_state(rng, 9, 1.0, 1.0, 1.0);
    const auto tau = inverse_dynamics(dbl, s);
    const auto expect = oracle.torques(s.q, s.qdot, s.qddot);
    worst2 = std::max(worst2, (tau - expect).norm() / (1.0 + expect.norm()));
  }
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "single err %.2e, double err %.2e, %.2fs", worst, worst2,
                elapsed);
  report(1, "dynamics oracles", single_ok && worst2 < 1e-6 && elapsed < 1.0, buf);
}

// ------------------------------------------------- 2: equation-of-motion form

void criterion_2() {
  const auto model = ts_test::humanoid();
  std::mt19937 rng(2);
  const int n = model.dof();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto s = random_state(rng, n, 0.8, 2.0, 5.0);
    const auto tau = inverse_dynamics(model, s);
    const auto m = mass_matrix(model, s.q);
    const auto h = bias_term(model, s.q, s.qdot);
    worst = std::max(worst,
                     (tau - (m * s.qddot + h)).norm() / (1.0 + tau.norm()));
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "worst residual %.2e over 100 states", worst);
  report(2, "tau = M qddot + h", worst <= 1e-9, buf);
}

// --------------------------------------------------- 3: Jacobian consistency

void criterion_3() {
  const auto model = ts_test::humanoid();
  std::mt19937 rng(3);
  const int n = model.dof();
  const auto s = random_state(rng, n, 0.6, 1.5, 4.0);
  const auto cfg = PerturbationConfig::for_fps(30.0);
  const auto raw = frame_jacobian_raw(model, s, cfg);
  const auto m = mass_matrix(model, s.q);
  const double block_err = (raw.rightCols(n) - m).norm();
  const bool block_ok = block_err <= 1e-5 * (1.0 + m.norm());

  const auto pend = ts_test::pendulum1();
  GeneralizedState ps{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6),
                      Eigen::VectorXd::Zero(6)};
  ps.q[3] = 0.7;
  const double exact = 9.81 * std::cos(0.7);
  auto entry = [&](double eps) {
    return frame_jacobian(pend, ps, PerturbationConfig::for_fps(30.0, eps))
        .matrix(0, 3);
  };
  const double ratio =
      std::abs(entry(2e-3) - exact) / std::abs(entry(1e-3) - exact);
  char buf[120];
  std::snprintf(buf, sizeof buf, "qddot block err %.2e, Richardson ratio %.3f",
                block_err, ratio);
  report(3, "Jacobian linearity", block_ok && ratio >= 3.5 && ratio <= 4.5, buf);
}

// ------------------------------------------------------ 4: spectral properties

// Jacobi-sweep singular values, written out independently of the library.
std::vector<double> jacobi_singular_values(Eigen::MatrixXd a) {
  Eigen::MatrixXd g = a.rows() <= a.cols()
                          ? Eigen::MatrixXd(a * a.transpose())
                          : Eigen::MatrixXd(a.transpose() * a);
  const int n = static_cast<int>(g.rows());
  for (int sweep = 0; sweep < 60; ++sweep)
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (g(p, q) == 0.0) continue;
        const double th = 0.5 * std::atan2(2.0 * g(p, q), g(p, p) - g(q, q));
        const double c = std::cos(th), s = std::sin(th);
        for (int i = 0; i < n; ++i) {
          const double gip = g(i, p), giq = g(i, q);
          g(i, p) = c * gip + s * giq;
          g(i, q) = -s * gip + c * giq;
        }
        for (int i = 0; i < n; ++i) {
          const double gpi = g(p, i), gqi = g(q, i);
          g(p, i) = c * gpi + s * gqi;
          g(q, i) = -s * gpi + c * gqi;
        }
      }
  std::vector<double> sv(n);
  for (int i = 0; i < n; ++i) sv[i] = std::sqrt(std::max(g(i, i), 0.0));
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

void criterion_4() {
  StackedJacobian eye;
  eye.matrix = Eigen::MatrixXd::Identity(6, 6);
  const bool identity_ok = spectral_diversity(eye) == 0.0;

  std::mt19937 rng(4);
  StackedJacobian a;
  a.matrix = Eigen::MatrixXd::Random(5, 9);
  const double c = 2.9;
  StackedJacobian ca;
  ca.matrix = c * a.matrix;
  const double scale_err = std::abs(
      spectral_diversity(ca) - spectral_diversity(a) - 5.0 * std::log(c));

  StackedJacobian diag;
  diag.matrix = Eigen::MatrixXd::Zero(3, 5);
  diag.matrix(0, 0) = 2.0;
  diag.matrix(1, 1) = 1.0;
  diag.matrix(2, 2) = 0.5;
  const auto sv = jacobi_singular_values(diag.matrix);
  double oracle = 0.0;
  for (double s : sv) oracle += std::log(std::max(s, 1e-12 * sv[0]));
  const double diag_err = std::abs(spectral_diversity(diag) - oracle);
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "identity d1 %s0, scale err %.2e, oracle err %.2e",
                identity_ok ? "=" : "!=", scale_err, diag_err);
  report(4, "spectral diversity", identity_ok && scale_err < 1e-9 &&
                                      diag_err < 1e-10, buf);
}

// --------------------------------------------------------------- 5: AM-GM

void criterion_5() {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(1e-6, 100.0);
  std::uniform_int_distribution<int> len(1, 16);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const int n = len(rng);
    std::vector<double> v(n);
    const double shared = val(rng);
    for (int i = 0; i < n; ++i) v[i] = trial % 4 == 0 ? shared : val(rng);
    double mean = 0.0, mean_log = 0.0;
    for (double x : v) {
      mean += x / n;
      mean_log += std::log(x) / n;
    }
    const double gap = std::log(mean) - mean_log;
    const bool all_equal =
        std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
    ok = gap >= -1e-12 && (all_equal ? std::abs(gap) <= 1e-12
                                     : (n == 1 || gap > 1e-12));
  }
  report(5, "AM-GM over segments", ok, "1000 random positive sets");
}

// ------------------------------------------------------------ 6: MID / DSJE

MidResult naive_mid(std::vector<ScoredRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const ScoredRecord& a, const ScoredRecord& b) {
              return a.mds < b.mds;
            });
  const int n = static_cast<int>(records.size());
  double total = 0.0;
  for (const auto& r : records) total += r.error;
  MidResult best;
  bool found = false;
  double running = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    running += records[i].error;
    if (records[i + 1].mds == records[i].mds) continue;
    const int low = i + 1, high = n - low;
    const double mu_low = running / low;
    const double mu_high = (total - running) / high;
    if (!found || mu_high - mu_low > best.gap) {
      best = {records[i].mds, mu_low, mu_high, mu_high - mu_low, low, high};
      found = true;
    }
  }
  return best;
}

void criterion_6() {
  std::mt19937 rng(6);
  std::uniform_int_distribution<int> len(2, 1000);
  std::uniform_real_distribution<double> val(0.0, 50.0);
  std::uniform_int_distribution<int> coarse(0, 20);
  bool match = true;
  for (int trial = 0; trial < 1000 && match; ++trial) {
    const int n = len(rng);
    std::vector<ScoredRecord> records(n);
    const bool ties = trial % 2 == 0;
    for (int i = 0; i < n; ++i) {
      records[i].mds = ties ? coarse(rng) : val(rng);
      records[i].error = val(rng);
    }
    MidResult fast;
    try {
      fast = mid(records);
    } catch (const TooFewRecords&) {
      continue;  // all scores tied, no admissible cut
    }
    const auto slow = naive_mid(records);
    match = fast.threshold == slow.threshold && fast.gap == slow.gap &&
            fast.mu_low == slow.mu_low && fast.mu_high == slow.mu_high;

    // DSJE vs a plain filtered mean at a random cut
    const double c = val(rng);
    double sum = 0.0;
    int cnt = 0;
    for (const auto& r : records)
      if (r.mds < c) {
        sum += r.error;
        ++cnt;
      }
    if (cnt > 0) match = match && dsje(records, c) == sum / cnt;
  }

  const double table[][2] = {
      {188.58, 16.67}, {267.20, 23.29}, {273.48, 26.20}, {309.36, 38.21},
      {337.27, 48.20}, {342.72, 48.45}, {355.95, 62.57}, {358.54, 63.40},
      {316.30, 130.68}, {215.71, 16.34}, {259.71, 25.28}, {270.28, 29.77},
      {325.62, 41.42}, {328.67, 55.56}, {333.87, 65.31}, {358.97, 61.47},
      {355.95, 62.56}, {349.02, 150.21}};
  std::vector<ScoredRecord> published;
  for (const auto& row : table) published.push_back({"", row[0], row[1]});
  const double stratum = dsje(published, 300.0);
  char buf[100];
  std::snprintf(buf, sizeof buf, "1000 datasets, published DSJE-300 = %.2f mm",
                stratum);
  report(6, "MID/DSJE equivalence", match && std::abs(stratum - 22.93) <= 0.01,
         buf);
}

// ----------------------------------------------------------- 7: correlations

double naive_kendall(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  long long con = 0, dis = 0, tx = 0, ty = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0)
        ++tx;
      else if (dy == 0.0)
        ++ty;
      else if (dx * dy > 0)
        ++con;
      else
        ++dis;
    }
  return static_cast<double>(con - dis) /
         (std::sqrt(static_cast<double>(con + dis + tx)) *
          std::sqrt(static_cast<double>(con + dis + ty)));
}

std::vector<double> naive_ranks(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    int less = 0, equal = 0;
    for (int j = 0; j < n; ++j) {
      if (x[j] < x[i]) ++less;
      if (x[j] == x[i]) ++equal;
    }
    r[i] = less + (equal + 1) / 2.0;
  }
  return r;
}

double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

void criterion_7() {
  std::vector<ScoredRecord> up, down;
  for (int i = 0; i < 25; ++i) {
    up.push_back({"", static_cast<double>(i), static_cast<double>(i)});
    down.push_back({"", static_cast<double>(i), static_cast<double>(-i)});
  }
  const auto rep_up = correlations(up);
  const auto rep_down = correlations(down);
  const bool exact = rep_up.pearson_r == 1.0 && rep_up.spearman_rho == 1.0 &&
                     rep_up.kendall_tau == 1.0 && rep_down.pearson_r == -1.0 &&
                     rep_down.spearman_rho == -1.0 &&
                     rep_down.kendall_tau == -1.0;

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(2, 1000);
  std::uniform_int_distribution<int> coarse(0, 25);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    const bool ties = trial % 2 == 0;
    std::vector<double> x(n), y(n);
    std::vector<ScoredRecord> records(n);
    for (int i = 0; i < n; ++i) {
      x[i] = ties ? coarse(rng) : val(rng);
      y[i] = ties ? coarse(rng) : val(rng);
      records[i] = {"", x[i], y[i]};
    }
    CorrelationReport rep;
    try {
      rep = correlations(records);
    } catch (const DegenerateVariance&) {
      continue;
    }
    worst = std::max(worst, std::abs(rep.pearson_r - naive_pearson(x, y)));
    worst = std::max(worst, std::abs(rep.spearman_rho -
                                     naive_pearson(naive_ranks(x),
                                                   naive_ranks(y))));
    worst = std::max(worst, std::abs(rep.kendall_tau - naive_kendall(x, y)));
  }
  char buf[100];
  std::snprintf(buf, sizeof buf, "exact +-1 %s, worst naive gap %.2e",
                exact ? "yes" : "NO", worst);
  report(7, "correlation equivalence", exact && worst <= 1e-12, buf);
}

// ------------------------------------------------------- 8: fixture ordering

Clip fixture_clip(const KinematicModel& model, const std::string& name) {
  const auto seq =
      load_motion(ts_test::data_path("fixtures/" + name + ".motion"), model);
  Clip c;
  c.source_id = name;
  c.motion = estimate_derivatives(seq);
  return c;
}

void criterion_8() {
  const auto model = ts_test::humanoid();
  const auto stand = fixture_clip(model, "static_stand");
  const auto wave = fixture_clip(model, "slow_wave");
  const auto spin = fixture_clip(model, "fast_spin_leg_lift");
  bool ok = true;
  std::string detail;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    RunConfig cfg;
    cfg.eps = eps;
    const double a = score_clip(model, stand, cfg).breakdown.mds;
    const double b = score_clip(model, wave, cfg).breakdown.mds;
    const double c = score_clip(model, spin, cfg).breakdown.mds;
    ok = ok && a < b && b < c;
    char buf[100];
    std::snprintf(buf, sizeof buf, "eps=%g: %.1f/%.1f/%.1f ", eps, a, b, c);
    detail += buf;
  }
  report(8, "difficulty ordering", ok, detail);
}

// ----------------------------------------------------------- 9: performance

void criterion_9() {
  const auto model = ts_test::humanoid();
  const auto clip = fixture_clip(model, "slow_wave");
  RunConfig cfg;

  auto t0 = Clock::now();
  score_clip(model, clip, cfg, 1);
  const double serial = seconds_since(t0);

  t0 = Clock::now();
  score_clip(model, clip, cfg, 8);
  const double eight = seconds_since(t0);

  // 100-clip batch, clip-level parallelism
  auto run_batch = [&](int threads) {
    const auto start = Clock::now();
    parallel_for(100, threads, [&](int) { score_clip(model, clip, cfg, 1); });
    return seconds_since(start);
  };
  const double batch1 = run_batch(1);
  const double batch8 = run_batch(8);
  const double speedup = batch1 / batch8;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "clip %.2fs serial, %.2fs x8; batch %.1fs -> %.1fs "
                "(%.2fx speedup)", serial, eight, batch1, batch8, speedup);
  report(9, "performance targets",
         serial < 10.0 && eight < 3.0 && speedup >= 6.0, buf);
}

// ----------------------------------------------------------- 10: determinism

void criterion_10() {
  const auto model = ts_test::humanoid();
  const auto clip = fixture_clip(model, "slow_wave");
  RunConfig cfg;
  std::vector<ClipScore> runs;
  for (int threads : {1, 1, 4, 8})
    runs.push_back(score_clip(model, clip, cfg, threads));
  bool ok = true;
  for (size_t i = 1; i < runs.size(); ++i) {
    const auto& a = runs[0].breakdown;
    const auto& b = runs[i].breakdown;
    ok = ok && std::memcmp(&a.d1, &b.d1, sizeof(double)) == 0 &&
         std::memcmp(&a.d2, &b.d2, sizeof(double)) == 0 &&
         std::memcmp(&a.d3, &b.d3, sizeof(double)) == 0 &&
         std::memcmp(&a.mds, &b.mds, sizeof(double)) == 0;
  }
  report(10, "determinism", ok, "bitwise equal across reruns and 1/4/8 threads");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
