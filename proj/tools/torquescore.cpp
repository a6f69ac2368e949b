// torquescore CLI: motion ingestion, clip partitioning, difficulty scoring,
// and dataset-level analytics.
//
// Exit codes: 0 success (possibly with per-item warnings), 2 usage/config
// error, 3 empty-result error, 4 internal numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <torquescore/torquescore.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace torquescore;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitNumerical = 4;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string default_model_path(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("TORQUESCORE_MODEL")) return env;
  return {};
}

KinematicModel load_model_or_die(const std::string& path) {
  if (path.empty()) {
    std::cerr << "error: no model given (use --model or TORQUESCORE_MODEL)\n";
    std::exit(kExitUsage);
  }
  try {
    return load_model(path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::exit(kExitUsage);
  }
}

void write_header(std::ostream& out, const RunConfig& cfg, bool timestamp) {
  out << "# torquescore " << kToolVersion << "\n";
  out << "# config: " << cfg.echo() << "\n";
  if (timestamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    out << "# timestamp: " << buf << "\n";
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  // "lo:hi:step" or a comma list "a,b,c"
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream is(spec);
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        step <= 0 || hi < lo)
      throw ValidationError("bad grid spec: " + spec);
    for (double v = lo; v <= hi + 1e-12; v += step)
      grid.push_back(std::abs(v) < 1e-12 ? 0.0 : v);
  } else {
    for (const auto& f : csv_split(spec))
      grid.push_back(csv_double(f, "grid"));
  }
  if (grid.empty()) throw ValidationError("empty grid: " + spec);
  return grid;
}

struct ScoreRowWriter {
  std::ostream& out;
  bool jsonl = false;

  void header() const {
    if (!jsonl)
      out << "clip_id,source_id,start_frame,t,J,D,d1,d2,d3,mds,"
             "degenerate_fraction,K\n";
  }
  void row(const ClipScore& s) const {
    if (jsonl) {
      json j{{"clip_id", s.clip_id},
             {"source_id", s.source_id},
             {"start_frame", s.start_frame},
             {"t", s.t},
             {"J", s.joints},
             {"D", s.directions},
             {"d1", s.breakdown.d1},
             {"d2", s.breakdown.d2},
             {"d3", s.breakdown.d3},
             {"mds", s.breakdown.mds},
             {"degenerate_fraction", s.breakdown.degenerate_fraction},
             {"K", s.breakdown.K}};
      out << j.dump() << "\n";
    } else {
      out << csv_escape(s.clip_id) << "," << csv_escape(s.source_id) << ","
          << s.start_frame << "," << s.t << "," << s.joints << ","
          << s.directions << "," << fmt(s.breakdown.d1) << ","
          << fmt(s.breakdown.d2) << "," << fmt(s.breakdown.d3) << ","
          << fmt(s.breakdown.mds) << ","
          << fmt(s.breakdown.degenerate_fraction) << "," << s.breakdown.K
          << "\n";
    }
  }
};

void dump_stack_csv(const std::string& path, const StackedJacobian& stack) {
  std::ofstream out(path);
  out << "# shape " << stack.matrix.rows() << " " << stack.matrix.cols()
      << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < stack.matrix.rows(); ++i) {
    for (int j = 0; j < stack.matrix.cols(); ++j)
      out << (j ? "," : "") << stack.matrix(i, j);
    out << "\n";
  }
}

int cmd_score(const std::vector<std::string>& motions, RunConfig cfg,
              const std::string& out_path, const std::string& format,
              bool timestamp, const std::string& dump_dir) {
  const KinematicModel model = load_model_or_die(cfg.model_path);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitUsage;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  ScoreRowWriter writer{out, format == "jsonl"};
  if (!writer.jsonl) write_header(out, cfg, timestamp);
  writer.header();

  int scored = 0, failed = 0;
  for (const auto& path : motions) {
    std::vector<Clip> clips;
    try {
      clips = prepare_clips(load_motion(path, model), cfg);
    } catch (const Error& e) {
      std::cerr << "warning: " << path << ": " << e.what() << "\n";
      ++failed;
      continue;
    }
    for (const auto& clip : clips) {
      try {
        const PerturbationConfig pcfg = cfg.perturbation(clip.motion.fps);
        const StackedJacobian stack =
            sequence_jacobians(model, clip, pcfg, cfg.threads);
        if (!dump_dir.empty()) {
          fs::create_directories(dump_dir);
          std::string name = clip.clip_id();
          for (auto& c : name)
            if (c == '/' || c == ':') c = '_';
          dump_stack_csv(dump_dir + "/" + name + ".csv", stack);
        }
        const auto frames = unstack(stack, model.joint_count());
        SpectralOptions opts;
        opts.floor_ratio = cfg.floor_ratio;
        opts.per_frame_sum = cfg.per_frame_spectral;
        ClipScore s;
        s.clip_id = clip.clip_id();
        s.source_id = clip.source_id;
        s.start_frame = clip.start_frame;
        s.t = clip.motion.frame_count();
        s.joints = model.joint_count();
        s.directions = 3 * model.dof();
        s.breakdown =
            compute_mds(stack, frames, cfg.weights, cfg.segment_count, opts);
        writer.row(s);
        ++scored;
      } catch (const Error& e) {
        std::cerr << "warning: " << clip.clip_id() << ": " << e.what() << "\n";
        ++failed;
      }
    }
  }
  if (scored == 0 && failed > 0) return kExitNumerical;
  return 0;
}

int cmd_partition(const std::vector<std::string>& motions, const RunConfig& cfg,
                  const std::string& out_dir, const std::string& manifest_path) {
  const KinematicModel model = load_model_or_die(cfg.model_path);
  fs::create_directories(out_dir);
  std::ofstream manifest(manifest_path);
  if (!manifest) {
    std::cerr << "error: cannot write " << manifest_path << "\n";
    return kExitUsage;
  }
  manifest << "clip_id,source_id,start_frame,length,fps,d1,d2,d3,mds\n";
  for (const auto& path : motions) {
    std::vector<Clip> clips;
    double fps = 0;
    try {
      MotionSequence seq = load_motion(path, model);
      if (cfg.target_fps > 0.0 && cfg.target_fps != seq.fps)
        seq = resample(seq, cfg.target_fps);
      fps = seq.fps;
      clips = partition_clips(seq, cfg.clip_len, cfg.stride);
    } catch (const Error& e) {
      std::cerr << "warning: " << path << ": " << e.what() << "\n";
      manifest << csv_escape(path + ":failed") << "," << csv_escape(path)
               << ",,,,,,," << "\n";
      continue;
    }
    for (const auto& clip : clips) {
      std::string name = fs::path(clip.source_id).stem().string() + "_" +
                         std::to_string(clip.start_frame) + ".motion";
      save_motion(out_dir + "/" + name, clip.motion);
      manifest << csv_escape(clip.clip_id()) << ","
               << csv_escape(clip.source_id) << "," << clip.start_frame << ","
               << clip.motion.frame_count() << "," << fmt(fps) << ",,,,\n";
    }
  }
  return 0;
}

std::map<std::string, double> read_column(const std::string& path,
                                          const std::string& id_col,
                                          const std::string& value_col) {
  const CsvTable table = read_csv(path);
  const int ic = table.column(id_col);
  const int vc = table.column(value_col);
  if (ic < 0 || vc < 0)
    throw ParseError(path + ": need columns '" + id_col + "' and '" +
                     value_col + "'");
  std::map<std::string, double> out;
  for (const auto& row : table.rows) {
    if (row[vc].empty()) continue;
    out[row[ic]] = csv_double(row[vc], path);
  }
  return out;
}

int cmd_analyze(const std::string& scores_path, const std::string& errors_path,
                bool want_mid, const std::string& dsje_spec,
                bool want_correlations, const std::string& outlier_spec,
                const std::string& out_path, const RunConfig& cfg) {
  json report;
  report["config"] = cfg.echo();
  json warnings = json::array();
  std::vector<ScoredRecord> records;
  // off by default; matches the near-failure visualization cut when given
  double err_cap = 0.0, mds_cap = 0.0;
  bool exclude = false;
  try {
    if (!outlier_spec.empty()) {
      const auto parts = csv_split(outlier_spec);
      if (parts.size() != 2)
        throw ValidationError("--exclude-outliers needs err_mm,mds");
      err_cap = csv_double(parts[0], "err cap");
      mds_cap = csv_double(parts[1], "mds cap");
      exclude = true;
    }
    const auto mds = read_column(scores_path, "clip_id", "mds");
    const auto errors = read_column(errors_path, "clip_id", "mpjpe_g");
    int excluded = 0;
    for (const auto& [id, m] : mds) {
      const auto it = errors.find(id);
      if (it == errors.end()) {
        warnings.push_back("unmatched score clip_id: " + id);
        continue;
      }
      if (exclude && it->second > err_cap && m > mds_cap) {
        ++excluded;
        continue;
      }
      records.push_back({id, m, it->second});
    }
    if (exclude) report["n_excluded"] = excluded;
    for (const auto& [id, e] : errors)
      if (!mds.count(id)) warnings.push_back("unmatched error clip_id: " + id);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (records.empty()) {
    std::cerr << "error: no joined records\n";
    return kExitEmpty;
  }
  report["n_joined"] = records.size();
  report["warnings"] = warnings;

  if (want_mid) {
    try {
      const MidResult m = mid(records);
      report["mid"] = {{"threshold", m.threshold}, {"mu_low", m.mu_low},
                       {"mu_high", m.mu_high},     {"gap", m.gap},
                       {"low_count", m.low_count}, {"high_count", m.high_count}};
    } catch (const Error& e) {
      report["mid"] = {{"error", e.what()}};
    }
  }
  if (!dsje_spec.empty()) {
    json d = json::object();
    for (const auto& f : csv_split(dsje_spec)) {
      const double c = csv_double(f, "--dsje");
      try {
        d[f] = dsje(records, c);
      } catch (const EmptyStratum& e) {
        d[f] = json{{"error", e.what()}};
      }
    }
    report["dsje"] = d;
  }
  if (want_correlations) {
    try {
      const CorrelationReport r = correlations(records);
      report["correlations"] = {{"pearson", r.pearson_r},
                                {"spearman", r.spearman_rho},
                                {"kendall", r.kendall_tau},
                                {"n", r.n}};
    } catch (const Error& e) {
      report["correlations"] = {{"error", e.what()}};
    }
  }

  const std::string text = report.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    out << text << "\n";
  }
  return 0;
}

int cmd_calibrate(const std::string& components_path,
                  const std::string& errors_path, const std::string& grid_spec,
                  const std::string& out_path) {
  std::vector<ComponentRow> components;
  std::vector<double> errors;
  try {
    const CsvTable table = read_csv(components_path);
    const int ic = table.column("clip_id");
    const int c1 = table.column("d1"), c2 = table.column("d2"),
              c3 = table.column("d3");
    if (ic < 0 || c1 < 0 || c2 < 0 || c3 < 0)
      throw ParseError(components_path + ": need clip_id,d1,d2,d3 columns");
    const auto error_map = read_column(errors_path, "clip_id", "mpjpe_g");
    for (const auto& row : table.rows) {
      const auto it = error_map.find(row[ic]);
      if (it == error_map.end()) continue;
      components.push_back({csv_double(row[c1], "d1"),
                            csv_double(row[c2], "d2"),
                            csv_double(row[c3], "d3")});
      errors.push_back(it->second);
    }
    const CalibrationResult best =
        calibrate_weights(components, errors, parse_grid(grid_spec));
    json out{{"w1", best.w1},
             {"w2", best.w2},
             {"w3", best.w3},
             {"spearman", best.spearman},
             {"low_confidence", best.low_confidence},
             {"n", components.size()}};
    const std::string text = out.dump(2);
    if (out_path.empty()) {
      std::cout << text << "\n";
    } else {
      std::ofstream f(out_path);
      f << text << "\n";
    }
  } catch (const TooFewRecords& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}

int cmd_inspect(const std::string& motion_path, RunConfig cfg, int frame,
                bool jacobian) {
  const KinematicModel model = load_model_or_die(cfg.model_path);
  try {
    cfg.no_partition = true;
    const auto clips = prepare_clips(load_motion(motion_path, model), cfg);
    const MotionSequence& seq = clips.front().motion;
    if (frame < 0 || frame >= seq.frame_count()) {
      std::cerr << "error: frame " << frame << " out of range\n";
      return kExitUsage;
    }
    GeneralizedState s{seq.frames[frame], seq.qdot[frame], seq.qddot[frame]};
    const TorqueVector tau = inverse_dynamics(model, s);
    const Eigen::VectorXd reduced = joint_torque_reduction(tau, model);
    std::cout << std::setprecision(10);
    std::cout << "frame " << frame << " fps " << seq.fps << "\n";
    std::cout << "root residual force: " << tau.head<3>().transpose() << "\n";
    for (int j = 0; j < model.joint_count(); ++j)
      std::cout << model.joints[j].name << ": tau=["
                << tau.segment<3>(3 + 3 * j).transpose()
                << "] |tau|=" << reduced[j] << "\n";
    if (jacobian) {
      const PerturbationConfig pcfg = cfg.perturbation(seq.fps);
      const FrameJacobian fj = frame_jacobian(model, s, pcfg, frame);
      std::cout << "jacobian " << fj.matrix.rows() << "x" << fj.matrix.cols()
                << (fj.degenerate ? " (degenerate)" : "") << "\n"
                << fj.matrix << "\n";
    }
  } catch (const SingularEulerMap& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torquescore: motion difficulty scoring from rigid-body "
               "perturbation dynamics"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "print tool and format versions");

  RunConfig cfg;
  std::string model_flag;
  std::vector<std::string> motions;
  std::string out_path, format = "csv", dump_dir;
  bool no_timestamp = false;
  std::string weights_spec;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_flag, "model file (or $TORQUESCORE_MODEL)");
    cmd->add_option("--clip-len", cfg.clip_len, "frames per clip");
    cmd->add_option("--stride", cfg.stride, "clip stride (default clip-len)");
    cmd->add_option("--fps", cfg.target_fps, "resample to this frame rate");
  };

  CLI::App* score = app.add_subcommand("score", "score motion files");
  score->add_option("motion", motions, "motion files")->required();
  add_common(score);
  score->add_option("--weights", weights_spec, "w1,w2,w3 (default 1,-1,1)");
  score->add_option("--eps", cfg.eps, "perturbation step (rad/m)");
  score->add_option("--K", cfg.segment_count, "segment count for d3");
  score->add_option("--floor-ratio", cfg.floor_ratio,
                    "relative singular-value floor");
  score->add_option("--threads", cfg.threads, "worker threads");
  score->add_option("--out", out_path, "output file (default stdout)");
  score->add_option("--format", format, "csv|jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  score->add_flag("--no-partition", cfg.no_partition,
                  "score the whole sequence as one clip");
  score->add_flag("--no-timestamp", no_timestamp,
                  "omit the timestamp header line");
  score->add_flag("--theta-only", cfg.theta_only,
                  "perturb only the Euler-angle block");
  score->add_flag("--per-frame-spectral", cfg.per_frame_spectral,
                  "per-frame spectral-diversity variant");
  score->add_option("--dump-jacobians", dump_dir,
                    "write per-clip stacked-Jacobian CSV dumps here");

  CLI::App* partition =
      app.add_subcommand("partition", "split motions into fixed-length clips");
  partition->add_option("motion", motions, "motion files");
  add_common(partition);
  std::string out_dir = "clips", manifest_path = "manifest.csv";
  partition->add_option("--out-dir", out_dir, "clip output directory");
  partition->add_option("--manifest", manifest_path, "manifest CSV path");

  CLI::App* analyze = app.add_subcommand("analyze", "dataset-level analytics");
  std::string scores_path, errors_path, dsje_spec;
  bool want_mid = false, want_correlations = false;
  analyze->add_option("--scores", scores_path, "scores CSV")->required();
  analyze->add_option("--errors", errors_path, "error-table CSV")->required();
  analyze->add_flag("--mid", want_mid, "maximum imitable difficulty");
  analyze->add_option("--dsje", dsje_spec, "comma list of DSJE thresholds");
  analyze->add_flag("--correlations", want_correlations,
                    "Pearson/Spearman/Kendall");
  std::string outlier_spec;
  analyze->add_option("--exclude-outliers", outlier_spec,
                      "err_mm,mds: drop records above both caps");
  analyze->add_option("--out", out_path, "report JSON path (default stdout)");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "grid-search diversity weights");
  std::string components_path, grid_spec = "-2:2:0.5";
  calibrate->add_option("--components", components_path, "component CSV")
      ->required();
  calibrate->add_option("--errors", errors_path, "error-table CSV")->required();
  calibrate->add_option("--grid", grid_spec, "lo:hi:step or comma list");
  calibrate->add_option("--out", out_path, "weights JSON path");

  CLI::App* inspect =
      app.add_subcommand("inspect", "dump per-frame torques / Jacobians");
  inspect->add_option("motion", motions, "motion file")->required();
  add_common(inspect);
  int frame = 0;
  bool with_jacobian = false;
  inspect->add_option("--frame", frame, "frame index");
  inspect->add_flag("--jacobian", with_jacobian, "include the frame Jacobian");
  inspect->add_option("--eps", cfg.eps, "perturbation step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  if (version) {
    std::cout << "torquescore " << kToolVersion << " (" << kModelFormat << ", "
              << kMotionFormat << ")\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  cfg.model_path = default_model_path(model_flag);
  try {
    if (!weights_spec.empty()) {
      const auto parts = csv_split(weights_spec);
      if (parts.size() != 3)
        throw ValidationError("--weights needs w1,w2,w3");
      cfg.weights = {csv_double(parts[0], "w1"), csv_double(parts[1], "w2"),
                     csv_double(parts[2], "w3")};
      cfg.weights.validate();
    }
    if (score->parsed())
      return cmd_score(motions, cfg, out_path, format, !no_timestamp, dump_dir);
    if (partition->parsed())
      return cmd_partition(motions, cfg, out_dir, manifest_path);
    if (analyze->parsed())
      return cmd_analyze(scores_path, errors_path, want_mid, dsje_spec,
                         want_correlations, outlier_spec, out_path, cfg);
    if (calibrate->parsed())
      return cmd_calibrate(components_path, errors_path, grid_spec, out_path);
    if (inspect->parsed())
      return cmd_inspect(motions.front(), cfg, frame, with_jacobian);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
