// Writes the shipped synthetic motion fixtures: a static stand, a slow
// one-arm wave, and a fast spin with a leg lift. 100 frames at 30 fps on
// the 24-joint default humanoid (N = 75).

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>

#include <torquescore/motion.hpp>

using namespace torquescore;

namespace {

constexpr int kFrames = 100;
constexpr double kFps = 30.0;
constexpr int kDof = 75;

// DoF offsets into q: root translation 0..2, joint j angles at 3 + 3j.
constexpr int kRootZ = 2;
constexpr int kRoot = 3;        // pelvis angles
constexpr int kLHip = 3 + 3 * 1;
constexpr int kLKnee = 3 + 3 * 4;
constexpr int kRShoulder = 3 + 3 * 17;
constexpr int kRElbow = 3 + 3 * 19;
constexpr int kLShoulder = 3 + 3 * 16;

Eigen::VectorXd stand_pose() {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(kDof);
  q[kRootZ] = 0.95;
  q[kLShoulder] = -1.2;       // arms down (rotate about x)
  q[kRShoulder] = 1.2;
  return q;
}

MotionSequence make(const std::string& id) {
  MotionSequence seq;
  seq.fps = kFps;
  seq.source_id = id;
  return seq;
}

MotionSequence static_stand() {
  MotionSequence seq = make("static_stand");
  const Eigen::VectorXd q = stand_pose();
  for (int i = 0; i < kFrames; ++i) seq.frames.push_back(q);
  return seq;
}

MotionSequence slow_wave() {
  MotionSequence seq = make("slow_wave");
  for (int i = 0; i < kFrames; ++i) {
    const double t = i / kFps;
    Eigen::VectorXd q = stand_pose();
    const double w = 2.0 * std::numbers::pi * 0.5;   // 0.5 Hz
    q[kRShoulder] = 1.2 - 0.5 - 0.25 * std::sin(w * t);   // raise + wave
    q[kRElbow + 2] = 0.4 * std::sin(w * t);
    q[kRoot + 2] = 0.03 * std::sin(w * t);               // gentle sway
    seq.frames.push_back(q);
  }
  return seq;
}

MotionSequence fast_spin_leg_lift() {
  MotionSequence seq = make("fast_spin_leg_lift");
  for (int i = 0; i < kFrames; ++i) {
    const double t = i / kFps;
    Eigen::VectorXd q = stand_pose();
    q[kRoot + 2] = 4.0 * t;                              // fast yaw spin
    q[kRootZ] = 0.95 + 0.06 * std::sin(2.0 * std::numbers::pi * 1.5 * t);
    const double lift = 2.0 * std::numbers::pi * 1.5;
    q[kLHip] = -1.0 * std::abs(std::sin(0.5 * lift * t));  // leg raise
    q[kLKnee] = 0.9 * std::abs(std::sin(0.5 * lift * t));
    q[kLShoulder] = -1.2 + 0.8 * std::sin(lift * t);       // arms flail
    q[kRShoulder] = 1.2 - 0.8 * std::sin(lift * t + 1.0);
    seq.frames.push_back(q);
  }
  return seq;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data/fixtures";
  std::filesystem::create_directories(dir);
  for (const MotionSequence& seq :
       {static_stand(), slow_wave(), fast_spin_leg_lift()}) {
    const std::string path = dir + "/" + seq.source_id + ".motion";
    save_motion(path, seq);
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}
