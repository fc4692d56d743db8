#pragma once

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "swingshot/nets.hpp"
#include "swingshot/rng.hpp"

namespace swingshot {

// Fixed row-block size for every log-prob / value forward pass. Per-row GEMM
// results are bitwise stable for a fixed block height but not across heights,
// so pinning one height makes stored log-probs match their minibatch
// recomputation exactly (rho == 1 on epoch 1, step 1) and makes results
// independent of the number of OpenMP threads.
constexpr Eigen::Index kForwardBlock = 250;

struct TrainConfig {
  double lr_init = 3e-4;
  double lr_final = 3e-5;  // reached via exponential annealing
  int minibatch = 2000;
  int epochs = 10;
  double gamma = 0.99;
  double clip_eps = 0.2;
  double max_grad_norm = 2.0;
  double entropy_coef = 0.0;
  long long total_samples = 25'000'000;
  int samples_per_iteration = 80'000;  // buffer size contract (80k simplified / 40k full)
  int num_envs = 1000;
  uint64_t seed = 0;
};

inline double anneal_lr(const TrainConfig& cfg, double progress) {
  progress = std::clamp(progress, 0.0, 1.0);
  return cfg.lr_init * std::pow(cfg.lr_final / cfg.lr_init, progress);
}

// Row-major batches: row gathers are contiguous and block views are cheap.
template <class Real>
using Batch = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Applies fn(block_index, first_row, num_rows) over fixed-size row blocks in
// parallel. The partition depends only on `rows`, never on thread count.
template <class Fn>
void for_row_blocks(Eigen::Index rows, Fn&& fn) {
  const int nblocks = static_cast<int>((rows + kForwardBlock - 1) / kForwardBlock);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nblocks; ++b) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(b) * kForwardBlock;
    fn(b, r0, std::min(kForwardBlock, rows - r0));
  }
}

template <class Real>
class BlockedNet {
 public:
  using Tape = typename Mlp<Real>::Tape;

  // Scratch tapes are pure per-call buffers; one per OpenMP thread.
  static std::vector<Tape>& tape_pool() {
    static thread_local std::vector<Tape> pool;  // placeholder, see scratch()
    return pool;
  }

  static void forward(const Mlp<Real>& net, const Batch<Real>& x, Batch<Real>& out,
                      std::vector<Tape>& scratch) {
    out.resize(x.rows(), net.output_dim());
    if (static_cast<int>(scratch.size()) < omp_get_max_threads())
      scratch.resize(static_cast<size_t>(omp_get_max_threads()));
    for_row_blocks(x.rows(), [&](int, Eigen::Index r0, Eigen::Index n) {
      Tape& tape = scratch[static_cast<size_t>(omp_get_thread_num())];
      const Batch<Real> xin = x.middleRows(r0, n);
      out.middleRows(r0, n) = net.forward(xin, tape);
    });
  }
};

// Transition storage for one training iteration, env-major:
// row(env, t) = env * steps_per_env + t.
template <class Real>
struct RolloutBuffer {
  int num_envs = 0;
  int steps_per_env = 0;
  Batch<Real> obs;          // normalized observations
  Batch<Real> actions;      // pre-clip samples
  Eigen::VectorXd rewards;
  std::vector<uint8_t> done;
  Batch<Real> bootstrap_obs;  // next observation per env after the last step
  Eigen::Matrix<Real, Eigen::Dynamic, 1> logp_old;
  Eigen::VectorXd value_old;
  Eigen::VectorXd returns;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> advantages;  // normalized

  Eigen::Index rows() const {
    return static_cast<Eigen::Index>(num_envs) * steps_per_env;
  }

  void allocate(int envs, int steps, int obs_dim, int act_dim) {
    num_envs = envs;
    steps_per_env = steps;
    obs.resize(rows(), obs_dim);
    actions.resize(rows(), act_dim);
    rewards.resize(rows());
    done.assign(static_cast<size_t>(rows()), 0);
    bootstrap_obs.resize(envs, obs_dim);
    logp_old.resize(rows());
    value_old.resize(rows());
    returns.resize(rows());
    advantages.resize(rows());
  }

  Eigen::Index row(int env, int t) const {
    return static_cast<Eigen::Index>(env) * steps_per_env + t;
  }
};

// Backward recursion R_t = r_t + gamma * R_{t+1}; R past a terminal step is
// zero and the horizon tail bootstraps with the old value function.
template <class Real>
void compute_returns(RolloutBuffer<Real>& buf, double gamma,
                     const Eigen::VectorXd& bootstrap_values) {
  for (int e = 0; e < buf.num_envs; ++e) {
    double running = bootstrap_values[e];
    for (int t = buf.steps_per_env - 1; t >= 0; --t) {
      const Eigen::Index i = buf.row(e, t);
      if (buf.done[static_cast<size_t>(i)]) running = 0.0;
      running = buf.rewards[i] + gamma * running;
      buf.returns[i] = running;
    }
  }
}

// Advantage = bootstrapped return - old value, normalized per iteration.
template <class Real>
void compute_advantages(RolloutBuffer<Real>& buf) {
  const Eigen::Index n = buf.rows();
  Eigen::VectorXd raw = buf.returns - buf.value_old;
  const double mean = raw.mean();
  const double var = (raw.array() - mean).square().sum() / static_cast<double>(n);
  const double inv_std = 1.0 / (std::sqrt(var) + 1e-8);
  buf.advantages.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    buf.advantages[i] = static_cast<Real>((raw[i] - mean) * inv_std);
}

// Clipped-surrogate contribution for one transition; exposed for tests.
inline double surrogate_term(double rho, double adv, double eps) {
  const double clipped = std::clamp(rho, 1.0 - eps, 1.0 + eps);
  return std::min(rho * adv, clipped * adv);
}

template <class Real>
struct Adam {
  std::vector<Real> m, v;
  long long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  void init(size_t n) {
    m.assign(n, Real(0));
    v.assign(n, Real(0));
    t = 0;
  }

  void step(double lr, Real* params, const Real* grads, size_t n) {
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t i = 0; i < n; ++i) {
      const double g = static_cast<double>(grads[i]);
      m[i] = static_cast<Real>(beta1 * m[i] + (1.0 - beta1) * g);
      v[i] = static_cast<Real>(beta2 * v[i] + (1.0 - beta2) * g * g);
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      params[i] -= static_cast<Real>(lr * mhat / (std::sqrt(vhat) + eps));
    }
  }
};

// Scales grads in place to the max-norm ball; returns the pre-clip norm.
template <class Real>
double clip_grad_norm(Real* grads, size_t n, double max_norm) {
  double sumsq = 0.0;
  for (size_t i = 0; i < n; ++i) sumsq += static_cast<double>(grads[i]) * grads[i];
  const double norm = std::sqrt(sumsq);
  if (norm > max_norm && norm > 0.0) {
    const Real scale = static_cast<Real>(max_norm / norm);
    for (size_t i = 0; i < n; ++i) grads[i] *= scale;
  }
  return norm;
}

// Actor-critic PPO updater. The actor maximizes the clipped surrogate; the
// critic regresses returns with its own Adam at the same learning rate.
template <class Real>
class PpoUpdater {
 public:
  using Grads = typename Mlp<Real>::Grads;
  using Tape = typename Mlp<Real>::Tape;

  PpoUpdater(GaussianPolicy<Real>& policy, Mlp<Real>& critic, TrainConfig cfg)
      : policy_(policy), critic_(critic), cfg_(cfg), shuffle_rng_(Rng::stream(cfg.seed, 0x9909)) {
    actor_adam_.init(static_cast<size_t>(policy.num_params()));
    critic_adam_.init(static_cast<size_t>(critic.num_params()));
  }

  struct IterationStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double mean_rho_first = 1.0;  // mean rho at epoch 1, step 1
    double max_abs_rho_err_first = 0.0;
    int gradient_steps = 0;
  };

  // Fills buf.logp_old / buf.value_old through the canonical blocked path,
  // then runs the epoch/minibatch updates.
  IterationStats train_iteration(RolloutBuffer<Real>& buf, double lr) {
    recompute_old(buf);

    IterationStats stats;
    const Eigen::Index n = buf.rows();
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      // Fisher-Yates with the repo RNG keeps shuffles reproducible.
      for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(shuffle_rng_.next_below(static_cast<uint64_t>(i + 1)));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
      }
      for (Eigen::Index start = 0; start + cfg_.minibatch <= n; start += cfg_.minibatch) {
        minibatch_step(buf, order, start, lr, epoch == 0 && start == 0, stats);
        ++stats.gradient_steps;
      }
    }
    return stats;
  }

  // Values for arbitrary normalized observations (canonical blocked path).
  void values(const Batch<Real>& obs, Eigen::VectorXd& out) {
    Batch<Real> v;
    BlockedNet<Real>::forward(critic_, obs, v, scratch_);
    out.resize(obs.rows());
    for (Eigen::Index i = 0; i < obs.rows(); ++i) out[i] = static_cast<double>(v(i, 0));
  }

  void recompute_old(RolloutBuffer<Real>& buf) {
    Batch<Real> mean;
    BlockedNet<Real>::forward(policy_.net, buf.obs, mean, scratch_);
    buf.logp_old.resize(buf.rows());
    for (Eigen::Index i = 0; i < buf.rows(); ++i)
      buf.logp_old[i] = policy_.log_prob_row(mean.row(i).data(), buf.actions.row(i).data());

    Batch<Real> v;
    BlockedNet<Real>::forward(critic_, buf.obs, v, scratch_);
    buf.value_old.resize(buf.rows());
    for (Eigen::Index i = 0; i < buf.rows(); ++i) buf.value_old[i] = static_cast<double>(v(i, 0));
  }

 private:
  void minibatch_step(const RolloutBuffer<Real>& buf, const std::vector<int>& order,
                      Eigen::Index start, double lr, bool first_step, IterationStats& stats) {
    const int B = cfg_.minibatch;
    const int obs_dim = static_cast<int>(buf.obs.cols());
    const int act_dim = static_cast<int>(buf.actions.cols());

    xmb_.resize(B, obs_dim);
    amb_.resize(B, act_dim);
    lpmb_.resize(B);
    advmb_.resize(B);
    for (int i = 0; i < B; ++i) {
      const int src = order[static_cast<size_t>(start + i)];
      xmb_.row(i) = buf.obs.row(src);
      amb_.row(i) = buf.actions.row(src);
      lpmb_[i] = buf.logp_old[src];
      advmb_[i] = buf.advantages[src];
    }

    // ---- actor ----
    const int nblocks = static_cast<int>((B + kForwardBlock - 1) / kForwardBlock);
    ensure_pools(nblocks);

    Batch<Real> mean;
    BlockedNet<Real>::forward(policy_.net, xmb_, mean, scratch_);

    // Per-sample gradient of the (maximized) surrogate w.r.t. logp_new.
    dY_.resize(B, act_dim);
    Eigen::VectorXd dlogstd = Eigen::VectorXd::Zero(act_dim);
    double loss_sum = 0.0;
    double rho_err_max = 0.0, rho_sum = 0.0;
    const double eps = cfg_.clip_eps;
    for (int i = 0; i < B; ++i) {
      const Real* mu = mean.row(i).data();
      const Real* a = amb_.row(i).data();
      const double logp_new = policy_.log_prob_row(mu, a);
      const double rho = std::exp(logp_new - static_cast<double>(lpmb_[i]));
      const double adv = advmb_[i];
      loss_sum += surrogate_term(rho, adv, eps);
      if (first_step) {
        rho_sum += rho;
        rho_err_max = std::max(rho_err_max, std::abs(rho - 1.0));
      }
      const bool unclipped_active = rho * adv <= std::clamp(rho, 1.0 - eps, 1.0 + eps) * adv;
      // d(maximized objective)/dlogp, negated for the minimizing optimizer.
      const double dmax_dlogp = unclipped_active ? adv * rho : 0.0;
      const double dloss_dlogp = -dmax_dlogp / B;
      for (int d = 0; d < act_dim; ++d) {
        const double sigma = std::exp(static_cast<double>(policy_.log_std[d]));
        const double z = (static_cast<double>(a[d]) - mu[d]) / sigma;
        dY_(i, d) = static_cast<Real>(dloss_dlogp * z / sigma);
        dlogstd[d] += dloss_dlogp * (z * z - 1.0);
      }
    }
    if (cfg_.entropy_coef > 0.0)
      for (int d = 0; d < act_dim; ++d) dlogstd[d] -= cfg_.entropy_coef;

    blocked_backward(policy_.net, xmb_, dY_, actor_grads_, actor_block_grads_);

    const auto n_actor = static_cast<size_t>(policy_.num_params());
    actor_flat_.resize(n_actor);
    Mlp<Real>::grads_to_flat(actor_grads_, actor_flat_.data());
    {
      const size_t base = n_actor - static_cast<size_t>(act_dim);
      for (int d = 0; d < act_dim; ++d)
        actor_flat_[base + static_cast<size_t>(d)] = static_cast<Real>(dlogstd[d]);
    }
    clip_grad_norm(actor_flat_.data(), n_actor, cfg_.max_grad_norm);
    actor_params_.resize(n_actor);
    policy_.net.get_params(actor_params_.data());
    std::copy(policy_.log_std.data(), policy_.log_std.data() + act_dim,
              actor_params_.data() + n_actor - static_cast<size_t>(act_dim));
    actor_adam_.step(lr, actor_params_.data(), actor_flat_.data(), n_actor);
    policy_.net.set_params(actor_params_.data());
    std::copy(actor_params_.data() + n_actor - static_cast<size_t>(act_dim),
              actor_params_.data() + n_actor, policy_.log_std.data());

    // ---- critic ----
    rmb_.resize(B);
    for (int i = 0; i < B; ++i) rmb_[i] = buf.returns[order[static_cast<size_t>(start + i)]];
    Batch<Real> v;
    BlockedNet<Real>::forward(critic_, xmb_, v, scratch_);
    dV_.resize(B, 1);
    double vloss = 0.0;
    for (int i = 0; i < B; ++i) {
      const double err = static_cast<double>(v(i, 0)) - rmb_[i];
      vloss += err * err;
      dV_(i, 0) = static_cast<Real>(2.0 * err / B);
    }
    blocked_backward(critic_, xmb_, dV_, critic_grads_, critic_block_grads_);
    const auto n_critic = static_cast<size_t>(critic_.num_params());
    critic_flat_.resize(n_critic);
    Mlp<Real>::grads_to_flat(critic_grads_, critic_flat_.data());
    clip_grad_norm(critic_flat_.data(), n_critic, cfg_.max_grad_norm);
    critic_params_.resize(n_critic);
    critic_.get_params(critic_params_.data());
    critic_adam_.step(lr, critic_params_.data(), critic_flat_.data(), n_critic);
    critic_.set_params(critic_params_.data());

    stats.policy_loss += -loss_sum / B;
    stats.value_loss += vloss / B;
    if (first_step) {
      stats.mean_rho_first = rho_sum / B;
      stats.max_abs_rho_err_first = rho_err_max;
    }
  }

  // Per-block gradient accumulation with a serial block-order reduction:
  // bitwise identical for any thread count.
  void blocked_backward(const Mlp<Real>& net, const Batch<Real>& x, const Batch<Real>& dY,
                        Grads& total, std::vector<Grads>& block_grads) {
    const int nblocks = static_cast<int>((x.rows() + kForwardBlock - 1) / kForwardBlock);
    if (static_cast<int>(block_grads.size()) < nblocks)
      block_grads.resize(static_cast<size_t>(nblocks));
    if (static_cast<int>(scratch_.size()) < omp_get_max_threads())
      scratch_.resize(static_cast<size_t>(omp_get_max_threads()));
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nblocks; ++b) {
      const Eigen::Index r0 = static_cast<Eigen::Index>(b) * kForwardBlock;
      const Eigen::Index len = std::min(kForwardBlock, x.rows() - r0);
      Tape& tape = scratch_[static_cast<size_t>(omp_get_thread_num())];
      Grads& g = block_grads[static_cast<size_t>(b)];
      net.ensure_shape(g);
      g.zero();
      const Batch<Real> xin = x.middleRows(r0, len);
      net.forward(xin, tape);
      net.backward(tape, dY.middleRows(r0, len), g);
    }
    net.ensure_shape(total);
    total.zero();
    for (int b = 0; b < nblocks; ++b) total.add(block_grads[static_cast<size_t>(b)]);
  }

  void ensure_pools(int nblocks) {
    if (static_cast<int>(actor_block_grads_.size()) < nblocks)
      actor_block_grads_.resize(static_cast<size_t>(nblocks));
    if (static_cast<int>(critic_block_grads_.size()) < nblocks)
      critic_block_grads_.resize(static_cast<size_t>(nblocks));
  }

  GaussianPolicy<Real>& policy_;
  Mlp<Real>& critic_;
  TrainConfig cfg_;
  Rng shuffle_rng_;
  Adam<Real> actor_adam_, critic_adam_;

  // Reused scratch.
  std::vector<Tape> scratch_;
  Grads actor_grads_, critic_grads_;
  std::vector<Grads> actor_block_grads_, critic_block_grads_;
  Batch<Real> xmb_, amb_, dY_, dV_;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> lpmb_;
  Eigen::VectorXd advmb_, rmb_;
  std::vector<Real> actor_flat_, critic_flat_, actor_params_, critic_params_;
};

}  // namespace swingshot
