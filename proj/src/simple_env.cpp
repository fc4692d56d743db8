#include "swingshot/simple_env.hpp"

#include <algorithm>
#include <cmath>

namespace swingshot {

namespace {
constexpr double kGravity = -9.81;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }
}  // namespace

double swing_force(double current_len, double target_len, double len_rate,
                   const SimpleConfig& cfg) {
  const double raw = cfg.kp_arm * (target_len - current_len) - cfg.kd_arm * len_rate;
  return std::clamp(raw, -cfg.force_max, cfg.force_max);
}

void enforce_length(SimpleState& state, const SimpleConfig& cfg) {
  const Vec2 anchor{state.anchor->x, state.anchor->y};
  Vec2 d = state.p - anchor;
  double len = d.norm();
  Vec2 u = len > 1e-9 ? d * (1.0 / len) : Vec2{0.0, -1.0};
  if (len > cfg.r_max) {
    state.p = anchor + u * cfg.r_max;
    const double vr = state.v.dot(u);
    if (vr > 0.0) state.v -= u * vr;
    len = cfg.r_max;
  } else if (len < cfg.r_min) {
    state.p = anchor + u * cfg.r_min;
    const double vr = state.v.dot(u);
    if (vr < 0.0) state.v -= u * vr;
    len = cfg.r_min;
  }
  state.arm_length = len;
}

TerminationStatus check_termination(const SimpleState& state, const HandholdSequence& seq,
                                    const SimpleConfig& cfg) {
  if (state.next_index >= static_cast<int>(seq.holds.size())) return TerminationStatus::Completed;
  if (!cfg.terminate_unrecoverable) return TerminationStatus::Alive;
  if (state.grabbing) return TerminationStatus::Alive;
  const Handhold& next = seq.holds[static_cast<size_t>(state.next_index)];
  if (state.p.y < next.y - cfg.r_max && state.v.y < 0.0) return TerminationStatus::Unrecoverable;
  return TerminationStatus::Alive;
}

SimpleStepResult step_simple(SimpleState& state, const SimpleAction& action,
                             const HandholdSequence& seq, const SimpleConfig& cfg) {
  SimpleStepResult result;
  const double offset = clamp_unit(action.length_offset) * cfg.offset_scale;
  const double grab_flag = clamp_unit(action.grab_flag);

  // Control-step boundary: release first (voluntary or forced), then grab.
  if (state.grabbing) {
    const bool min_ok = !cfg.enforce_min_grab || state.grab_steps >= cfg.min_grab_steps();
    if (cfg.enforce_max_grab && state.grab_steps >= cfg.max_grab_steps()) {
      state.grabbing = false;
      state.anchor.reset();
      state.grab_steps = 0;
      result.events.add(StepEvent::Release);
      result.events.add(StepEvent::TerminatedMaxGrab);
    } else if (grab_flag <= 0.0 && min_ok) {
      state.grabbing = false;
      state.anchor.reset();
      state.grab_steps = 0;
      result.events.add(StepEvent::Release);
    }
  }
  if (!state.grabbing && grab_flag > 0.0 &&
      state.next_index < static_cast<int>(seq.holds.size())) {
    const Handhold& next = seq.holds[static_cast<size_t>(state.next_index)];
    const Vec2 to_hold{next.x - state.p.x, next.y - state.p.y};
    if (to_hold.norm() <= cfg.grab_tolerance) {
      state.grabbing = true;
      state.anchor = next;
      state.arm_length = (state.p - Vec2{next.x, next.y}).norm();
      state.grab_steps = 0;
      state.next_index += 1;
      result.reward += 1.0;
      result.events.add(StepEvent::GrabSuccess);
    }
  }

  const Vec2 gravity{0.0, kGravity};
  if (state.grabbing) {
    const Vec2 anchor{state.anchor->x, state.anchor->y};
    // Target length from the arm length at the boundary, held for all substeps.
    const double target_len = (state.p - anchor).norm() + offset;
    for (int i = 0; i < cfg.substeps; ++i) {
      const Vec2 d = state.p - anchor;
      const double len = d.norm();
      const Vec2 u = len > 1e-9 ? d * (1.0 / len) : Vec2{0.0, -1.0};
      const double len_rate = state.v.dot(u);
      const double f = swing_force(len, target_len, len_rate, cfg);
      const Vec2 accel = u * (f / cfg.mass) + gravity;
      state.v += accel * cfg.dt;
      state.p += state.v * cfg.dt;
      enforce_length(state, cfg);
    }
    state.grab_steps += 1;
  } else {
    for (int i = 0; i < cfg.substeps; ++i) {
      state.v += gravity * cfg.dt;
      state.p += state.v * cfg.dt;
    }
  }
  state.episode_steps += 1;

  if (!state.p.finite() || !state.v.finite())
    throw SimulationDiverged("simple_env: non-finite state");

  const TerminationStatus status = check_termination(state, seq, cfg);
  if (status != TerminationStatus::Alive) {
    result.terminated = true;
    if (status == TerminationStatus::Unrecoverable)
      result.events.add(StepEvent::TerminatedUnrecoverable);
  }
  if (state.episode_steps >= cfg.max_episode_steps) result.terminated = true;
  return result;
}

void observe_simple(const SimpleState& state, const HandholdSequence& seq,
                    const SimpleConfig& cfg, double* out) {
  out[0] = state.v.x;
  out[1] = state.v.y;
  out[2] = state.grabbing
               ? std::min(static_cast<double>(state.grab_steps) / cfg.max_grab_steps(), 1.0)
               : 0.0;
  const int last = static_cast<int>(seq.holds.size()) - 1;
  const int current = std::max(state.next_index - 1, 0);
  for (int i = 0; i <= cfg.lookahead; ++i) {
    const Handhold& h = seq.holds[static_cast<size_t>(std::min(current + i, last))];
    out[3 + 2 * i] = h.x - state.p.x;
    out[4 + 2 * i] = h.y - state.p.y;
  }
}

void SimpleEnv::reset(HandholdSequence seq) {
  if (seq.holds.size() < 2) throw ConfigError("SimpleEnv::reset: need >= 2 holds");
  seq_ = std::move(seq);
  state_ = SimpleState{};
  const Handhold& first = seq_.holds[0];
  state_.grabbing = true;
  state_.anchor = first;
  state_.arm_length = cfg_.initial_arm;
  // Horizontally behind the anchor so gravity swings the mass toward +x.
  state_.p = Vec2{first.x - cfg_.initial_arm, first.y};
  state_.v = Vec2{0.0, 0.0};
  state_.grab_steps = 0;
  state_.next_index = 1;
}

SimpleStepResult SimpleEnv::step(const SimpleAction& action) {
  return step_simple(state_, action, seq_, cfg_);
}

void SimpleEnv::observe(double* out) const { observe_simple(state_, seq_, cfg_, out); }

}  // namespace swingshot
