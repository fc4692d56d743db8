#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "swingshot/terrain.hpp"
#include "swingshot/vec2.hpp"

namespace swingshot {

struct SimulationDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StepEvent : uint8_t {
  GrabSuccess = 1 << 0,
  Release = 1 << 1,
  TerminatedUnrecoverable = 1 << 2,
  TerminatedMaxGrab = 1 << 3,
};

struct EventSet {
  uint8_t bits = 0;
  void add(StepEvent e) { bits |= static_cast<uint8_t>(e); }
  bool has(StepEvent e) const { return bits & static_cast<uint8_t>(e); }
};

enum class TerminationStatus { Alive, Unrecoverable, Completed };

struct SimpleConfig {
  double r_min = 0.10;            // virtual arm annulus, meters
  double r_max = 0.75;
  double mass = 9.8;              // kg
  double kp_arm = 1200.0;         // N/m
  double kd_arm = 60.0;           // N s/m
  double force_max = 240.0;       // N
  double offset_scale = 0.15;     // meters per unit action, per control step
  double grab_tolerance = 0.05;   // meters
  double min_grab_duration = 0.25;  // seconds
  double max_grab_duration = 4.0;   // seconds
  double initial_arm = 0.6;       // reset hang length
  double dt = 1.0 / 480.0;
  int substeps = 8;               // 480 Hz sim, 60 Hz control
  int lookahead = 1;              // N upcoming handholds in the observation
  // Early-termination ablation toggles.
  bool terminate_unrecoverable = true;
  bool enforce_min_grab = true;
  bool enforce_max_grab = true;
  int max_episode_steps = 6000;   // safety cap, 100 s at 60 Hz

  int observation_dim() const { return 3 + 2 * (lookahead + 1); }
  double control_period() const { return substeps * dt; }
  // Duration gates are compared in whole control steps so that e.g. the 4 s
  // limit triggers at exactly 240 steps regardless of float accumulation.
  int min_grab_steps() const {
    return static_cast<int>(std::llround(min_grab_duration / control_period()));
  }
  int max_grab_steps() const {
    return static_cast<int>(std::llround(max_grab_duration / control_period()));
  }
};

struct SimpleState {
  Vec2 p;                      // position, meters
  Vec2 v;                      // velocity, m/s
  bool grabbing = false;
  std::optional<Handhold> anchor;
  double arm_length = 0.0;     // |p - anchor| while grabbing
  int grab_steps = 0;          // control steps since grab
  int next_index = 0;          // next handhold to reach
  int episode_steps = 0;

  double grab_elapsed(const SimpleConfig& cfg) const { return grab_steps * cfg.control_period(); }
  double episode_time(const SimpleConfig& cfg) const { return episode_steps * cfg.control_period(); }
};

struct SimpleAction {
  double length_offset = 0.0;  // [-1, 1], scaled to meters by config
  double grab_flag = 0.0;      // grab iff > 0
};

struct SimpleStepResult {
  double reward = 0.0;
  bool terminated = false;
  EventSet events;
};

// Signed force along the arm, positive pushing away from the anchor,
// clamped to +/- force_max.
double swing_force(double current_len, double target_len, double len_rate,
                   const SimpleConfig& cfg);

// Projects the state back into the annulus [r_min, r_max] and removes the
// violating radial velocity component (impulse along the arm).
void enforce_length(SimpleState& state, const SimpleConfig& cfg);

TerminationStatus check_termination(const SimpleState& state, const HandholdSequence& seq,
                                    const SimpleConfig& cfg);

// Point-mass environment: spring-damper pendulum swing, ballistic flight,
// grab/release at control-step boundaries, sparse reward on grabs.
class SimpleEnv {
 public:
  explicit SimpleEnv(SimpleConfig cfg = {}) : cfg_(cfg) {}

  const SimpleConfig& config() const { return cfg_; }
  const SimpleState& state() const { return state_; }
  const HandholdSequence& sequence() const { return seq_; }

  void reset(HandholdSequence seq);
  SimpleStepResult step(const SimpleAction& action);

  // char: (vx, vy, t_norm); task: current + N upcoming holds relative to p.
  void observe(double* out) const;
  int observation_dim() const { return cfg_.observation_dim(); }
  static constexpr int action_dim() { return 2; }

  // Completed handholds this episode (= number of grab successes).
  int handholds_completed() const { return state_.next_index - 1; }

 private:
  SimpleConfig cfg_;
  SimpleState state_;
  HandholdSequence seq_;
};

// Free-function step used by both the env and tests; pure in (state, action).
SimpleStepResult step_simple(SimpleState& state, const SimpleAction& action,
                             const HandholdSequence& seq, const SimpleConfig& cfg);

void observe_simple(const SimpleState& state, const HandholdSequence& seq,
                    const SimpleConfig& cfg, double* out);

}  // namespace swingshot
