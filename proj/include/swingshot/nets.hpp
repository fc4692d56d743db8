#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "swingshot/rng.hpp"

namespace swingshot {

enum class Activation : uint8_t { Relu, Softsign, Tanh, Linear };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden;
  std::vector<Activation> hidden_act;
  int output_dim = 0;
  Activation output_act = Activation::Linear;

  void validate() const {
    if (input_dim <= 0 || output_dim <= 0 || hidden.empty())
      throw std::invalid_argument("MlpSpec: need input, output and >= 1 hidden layer");
    if (hidden.size() != hidden_act.size())
      throw std::invalid_argument("MlpSpec: one activation per hidden layer");
    for (int w : hidden)
      if (w <= 0) throw std::invalid_argument("MlpSpec: widths must be positive");
  }
  int num_layers() const { return static_cast<int>(hidden.size()) + 1; }
};

// The paper-specified architectures. The simplified stage uses 3x256 ReLU
// nets; the full stage uses 5x256 with softsign on the first three policy
// layers. Actor heads are Tanh so actions live in [-1, 1].
MlpSpec simple_actor_spec(int obs_dim);
MlpSpec simple_critic_spec(int obs_dim);
MlpSpec full_actor_spec(int obs_dim);
MlpSpec full_critic_spec(int obs_dim);

template <class Real>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  // Activations kept per layer so backward can run from the same pass.
  struct Tape {
    std::vector<Matrix> acts;  // acts[0] = input, acts[i] = layer i output
  };

  struct Grads {
    std::vector<Matrix> dW;
    std::vector<Vector> db;

    void zero() {
      for (auto& m : dW) m.setZero();
      for (auto& v : db) v.setZero();
    }
    void add(const Grads& o) {
      for (size_t i = 0; i < dW.size(); ++i) {
        dW[i] += o.dW[i];
        db[i] += o.db[i];
      }
    }
  };

  Mlp(MlpSpec spec, uint64_t seed) : spec_(std::move(spec)) {
    spec_.validate();
    const int n = spec_.num_layers();
    weights_.resize(n);
    biases_.resize(n);
    for (int i = 0; i < n; ++i) {
      const int in = layer_in(i), out = layer_out(i);
      weights_[i].resize(in, out);
      biases_[i] = Vector::Zero(out);
      // Deterministic fan-in-scaled uniform init.
      Rng rng = Rng::stream(seed, static_cast<uint64_t>(i));
      const double bound = 1.0 / std::sqrt(static_cast<double>(in));
      for (Eigen::Index k = 0; k < weights_[i].size(); ++k)
        weights_[i].data()[k] = static_cast<Real>(rng.uniform(-bound, bound));
    }
  }

  const MlpSpec& spec() const { return spec_; }
  int input_dim() const { return spec_.input_dim; }
  int output_dim() const { return spec_.output_dim; }

  // Batched forward, rows are samples. The tape is reusable across calls.
  const Matrix& forward(const Matrix& x, Tape& tape) const {
    if (x.cols() != spec_.input_dim) throw std::invalid_argument("Mlp: observation dim mismatch");
    const int n = spec_.num_layers();
    tape.acts.resize(static_cast<size_t>(n) + 1);
    tape.acts[0] = x;
    for (int i = 0; i < n; ++i) {
      Matrix& a = tape.acts[static_cast<size_t>(i) + 1];
      a.resize(x.rows(), layer_out(i));
      a.noalias() = tape.acts[static_cast<size_t>(i)] * weights_[i];
      a.rowwise() += biases_[i].transpose();
      apply_activation(activation_at(i), a);
    }
    return tape.acts.back();
  }

  Matrix forward(const Matrix& x) const {
    Tape tape;
    return forward(x, tape);
  }

  // dY is dLoss/dOutput; accumulates parameter gradients, returns nothing.
  // Gradients are exact reverse-mode through the recorded tape.
  void backward(const Tape& tape, Matrix dY, Grads& grads) const {
    const int n = spec_.num_layers();
    ensure_shape(grads);
    for (int i = n - 1; i >= 0; --i) {
      const Matrix& a = tape.acts[static_cast<size_t>(i) + 1];
      apply_activation_grad(activation_at(i), a, dY);  // dY becomes dZ
      grads.dW[static_cast<size_t>(i)].noalias() +=
          tape.acts[static_cast<size_t>(i)].transpose() * dY;
      grads.db[static_cast<size_t>(i)] += dY.colwise().sum().transpose();
      if (i > 0) {
        Matrix prev = dY * weights_[static_cast<size_t>(i)].transpose();
        dY.swap(prev);
      }
    }
  }

  void ensure_shape(Grads& grads) const {
    const int n = spec_.num_layers();
    if (static_cast<int>(grads.dW.size()) == n) return;
    grads.dW.resize(n);
    grads.db.resize(n);
    for (int i = 0; i < n; ++i) {
      grads.dW[static_cast<size_t>(i)] = Matrix::Zero(layer_in(i), layer_out(i));
      grads.db[static_cast<size_t>(i)] = Vector::Zero(layer_out(i));
    }
  }

  Eigen::Index num_params() const {
    Eigen::Index total = 0;
    for (int i = 0; i < spec_.num_layers(); ++i)
      total += weights_[static_cast<size_t>(i)].size() + biases_[static_cast<size_t>(i)].size();
    return total;
  }

  // Flat parameter vector: [W0, b0, W1, b1, ...] in storage order.
  void get_params(Real* out) const {
    for (int i = 0; i < spec_.num_layers(); ++i) {
      const auto& w = weights_[static_cast<size_t>(i)];
      const auto& b = biases_[static_cast<size_t>(i)];
      std::copy(w.data(), w.data() + w.size(), out);
      out += w.size();
      std::copy(b.data(), b.data() + b.size(), out);
      out += b.size();
    }
  }

  void set_params(const Real* in) {
    for (int i = 0; i < spec_.num_layers(); ++i) {
      auto& w = weights_[static_cast<size_t>(i)];
      auto& b = biases_[static_cast<size_t>(i)];
      std::copy(in, in + w.size(), w.data());
      in += w.size();
      std::copy(in, in + b.size(), b.data());
      in += b.size();
    }
  }

  static void grads_to_flat(const Grads& grads, Real* out) {
    for (size_t i = 0; i < grads.dW.size(); ++i) {
      const auto& w = grads.dW[i];
      const auto& b = grads.db[i];
      std::copy(w.data(), w.data() + w.size(), out);
      out += w.size();
      std::copy(b.data(), b.data() + b.size(), out);
      out += b.size();
    }
  }

 private:
  int layer_in(int i) const {
    return i == 0 ? spec_.input_dim : spec_.hidden[static_cast<size_t>(i) - 1];
  }
  int layer_out(int i) const {
    return i == spec_.num_layers() - 1 ? spec_.output_dim : spec_.hidden[static_cast<size_t>(i)];
  }
  Activation activation_at(int i) const {
    return i == spec_.num_layers() - 1 ? spec_.output_act : spec_.hidden_act[static_cast<size_t>(i)];
  }

  static void apply_activation(Activation act, Matrix& z) {
    switch (act) {
      case Activation::Relu:
        z = z.cwiseMax(Real(0));
        break;
      case Activation::Softsign:
        z.array() /= (Real(1) + z.array().abs());
        break;
      case Activation::Tanh:
        z.array() = z.array().tanh();
        break;
      case Activation::Linear:
        break;
    }
  }

  // All derivatives are recoverable from the post-activation value:
  // relu' = [a > 0], tanh' = 1 - a^2, softsign' = (1 - |a|)^2.
  static void apply_activation_grad(Activation act, const Matrix& a, Matrix& dY) {
    switch (act) {
      case Activation::Relu:
        dY.array() *= (a.array() > Real(0)).template cast<Real>();
        break;
      case Activation::Softsign: {
        dY.array() *= (Real(1) - a.array().abs()).square();
        break;
      }
      case Activation::Tanh:
        dY.array() *= Real(1) - a.array().square();
        break;
      case Activation::Linear:
        break;
    }
  }

  MlpSpec spec_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

// Diagonal Gaussian policy head: state-independent learned log-std over a
// Tanh-bounded mean. Samples are taken pre-clip; the environments clip.
template <class Real>
struct GaussianPolicy {
  using Matrix = typename Mlp<Real>::Matrix;
  using Vector = typename Mlp<Real>::Vector;

  Mlp<Real> net;
  Vector log_std;

  GaussianPolicy(MlpSpec spec, uint64_t seed, double init_log_std = std::log(0.5))
      : net(std::move(spec), seed),
        log_std(Vector::Constant(net.output_dim(), static_cast<Real>(init_log_std))) {}

  int action_dim() const { return net.output_dim(); }

  void sample_row(const Real* mean, Rng& rng, Real* action_out) const {
    for (int d = 0; d < action_dim(); ++d) {
      const Real sigma = std::exp(log_std[d]);
      action_out[d] = mean[d] + sigma * static_cast<Real>(rng.normal());
    }
  }

  // Sum of per-dimension Gaussian log densities.
  Real log_prob_row(const Real* mean, const Real* action) const {
    constexpr Real kLogSqrt2Pi = Real(0.91893853320467274178);
    Real lp = 0;
    for (int d = 0; d < action_dim(); ++d) {
      const Real z = (action[d] - mean[d]) * std::exp(-log_std[d]);
      lp += -Real(0.5) * z * z - log_std[d] - kLogSqrt2Pi;
    }
    return lp;
  }

  Eigen::Index num_params() const { return net.num_params() + log_std.size(); }
};

}  // namespace swingshot
