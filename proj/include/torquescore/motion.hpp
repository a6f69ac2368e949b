#pragma once

#include <Eigen/Core>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "torquescore/errors.hpp"
#include "torquescore/model.hpp"
#include "torquescore/version.hpp"

namespace torquescore {

struct MotionSequence {
  double fps = 30.0;
  std::vector<Eigen::VectorXd> frames;            // q per frame, length N
  std::vector<Eigen::VectorXd> qdot;              // empty until estimated
  std::vector<Eigen::VectorXd> qddot;
  std::string source_id;

  int frame_count() const { return static_cast<int>(frames.size()); }
  bool has_derivatives() const {
    return qdot.size() == frames.size() && qddot.size() == frames.size() &&
           !frames.empty();
  }
};

/// Fixed-length contiguous slice of a source sequence.
struct Clip {
  std::string source_id;
  int start_frame = 0;
  MotionSequence motion;

  std::string clip_id() const {
    return source_id + ":" + std::to_string(start_frame);
  }
};

inline MotionSequence load_motion(std::istream& in, const std::string& origin,
                                  const KinematicModel& model) {
  std::string line;
  if (!std::getline(in, line) || line != kMotionFormat)
    throw ParseError(origin + ": bad header, expected '" +
                     std::string(kMotionFormat) + "'");
  MotionSequence seq;
  seq.source_id = origin;
  std::string key;
  double fps = 0;
  int dof = 0;
  if (!(in >> key >> fps) || key != "fps" || fps <= 0)
    throw ParseError(origin + ": expected 'fps <value>' line");
  if (!(in >> key >> dof) || key != "dof" || dof <= 0)
    throw ParseError(origin + ": expected 'dof <N>' line");
  if (dof != model.dof())
    throw DimensionMismatch(origin + ": motion dof " + std::to_string(dof) +
                            " does not match model N=" +
                            std::to_string(model.dof()));
  seq.fps = fps;
  std::getline(in, line);  // finish the dof line
  int lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Eigen::VectorXd q(dof);
    double v;
    int i = 0;
    while (ls >> v) {
      if (i >= dof)
        throw ParseError(origin + ":" + std::to_string(lineno) +
                         ": frame longer than dof");
      q[i++] = v;
    }
    if (i == 0) continue;
    if (i != dof)
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": frame has " + std::to_string(i) + " of " +
                       std::to_string(dof) + " values");
    if (!q.allFinite())
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": non-finite value");
    seq.frames.push_back(std::move(q));
  }
  if (seq.frames.empty())
    throw ParseError(origin + ": no frames");
  return seq;
}

inline MotionSequence load_motion(const std::string& path,
                                  const KinematicModel& model) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open motion file: " + path);
  return load_motion(in, path, model);
}

inline void save_motion(std::ostream& out, const MotionSequence& seq) {
  out << kMotionFormat << "\n";
  out << "fps " << seq.fps << "\n";
  out << "dof " << (seq.frames.empty() ? 0 : seq.frames.front().size()) << "\n";
  out.precision(17);
  for (const auto& q : seq.frames) {
    for (int i = 0; i < q.size(); ++i) out << (i ? " " : "") << q[i];
    out << "\n";
  }
}

inline void save_motion(const std::string& path, const MotionSequence& seq) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write motion file: " + path);
  save_motion(out, seq);
}

/// Remove 2*pi jumps from the angle tracks (entries 3..N-1) so consecutive
/// frames differ by at most pi per coordinate. Translation is untouched.
inline std::vector<Eigen::VectorXd> unwrap_angles(
    const std::vector<Eigen::VectorXd>& frames) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<Eigen::VectorXd> out = frames;
  for (size_t t = 1; t < out.size(); ++t) {
    for (int i = 3; i < out[t].size(); ++i) {
      const double d = out[t][i] - out[t - 1][i];
      out[t][i] -= two_pi * std::round(d / two_pi);
    }
  }
  return out;
}

/// Second-order finite-difference velocity and acceleration tracks.
/// Interior frames use central differences; endpoints one-sided
/// second-order stencils. Angles are unwrapped before differencing.
inline MotionSequence estimate_derivatives(const MotionSequence& seq) {
  const int t = seq.frame_count();
  if (t < 3) throw TooShort("estimate_derivatives needs >= 3 frames");
  const double fps = seq.fps;
  const std::vector<Eigen::VectorXd> u = unwrap_angles(seq.frames);
  MotionSequence out = seq;
  out.qdot.resize(t);
  out.qddot.resize(t);
  for (int i = 0; i < t; ++i) {
    if (i == 0) {
      out.qdot[i] = (-1.5 * u[0] + 2.0 * u[1] - 0.5 * u[2]) * fps;
      if (t >= 4)
        out.qddot[i] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) * fps * fps;
      else
        out.qddot[i] = (u[0] - 2.0 * u[1] + u[2]) * fps * fps;
    } else if (i == t - 1) {
      out.qdot[i] = (1.5 * u[t - 1] - 2.0 * u[t - 2] + 0.5 * u[t - 3]) * fps;
      if (t >= 4)
        out.qddot[i] = (2.0 * u[t - 1] - 5.0 * u[t - 2] + 4.0 * u[t - 3] -
                        u[t - 4]) * fps * fps;
      else
        out.qddot[i] = (u[t - 1] - 2.0 * u[t - 2] + u[t - 3]) * fps * fps;
    } else {
      out.qdot[i] = (u[i + 1] - u[i - 1]) * (fps / 2.0);
      out.qddot[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * fps * fps;
    }
  }
  return out;
}

/// Split into fixed-length clips at offsets 0, stride, 2*stride, ...;
/// a trailing remainder shorter than clip_len is dropped.
inline std::vector<Clip> partition_clips(const MotionSequence& seq,
                                         int clip_len = 100, int stride = 0) {
  if (stride == 0) stride = clip_len;
  if (clip_len < 8)
    throw ValidationError("clip_len must be >= 8");
  if (stride < 1)
    throw ValidationError("stride must be >= 1");
  std::vector<Clip> clips;
  const int t = seq.frame_count();
  for (int start = 0; start + clip_len <= t; start += stride) {
    Clip c;
    c.source_id = seq.source_id;
    c.start_frame = start;
    c.motion.fps = seq.fps;
    c.motion.source_id = seq.source_id;
    c.motion.frames.assign(seq.frames.begin() + start,
                           seq.frames.begin() + start + clip_len);
    if (seq.has_derivatives()) {
      c.motion.qdot.assign(seq.qdot.begin() + start,
                           seq.qdot.begin() + start + clip_len);
      c.motion.qddot.assign(seq.qddot.begin() + start,
                            seq.qddot.begin() + start + clip_len);
    }
    clips.push_back(std::move(c));
  }
  return clips;
}

/// Decimate to target_fps; source fps must be an integer multiple.
/// Derivative tracks are invalidated.
inline MotionSequence resample(const MotionSequence& seq, double target_fps) {
  if (target_fps <= 0)
    throw ValidationError("target fps must be > 0");
  const double ratio = seq.fps / target_fps;
  const int stride = static_cast<int>(std::lround(ratio));
  if (stride < 1 || std::abs(ratio - stride) > 1e-9)
    throw NonIntegerStride("fps " + std::to_string(seq.fps) +
                           " is not an integer multiple of target " +
                           std::to_string(target_fps));
  MotionSequence out;
  out.fps = target_fps;
  out.source_id = seq.source_id;
  for (int i = 0; i < seq.frame_count(); i += stride)
    out.frames.push_back(seq.frames[i]);
  return out;
}

}  // namespace torquescore
