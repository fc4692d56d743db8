#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace swingshot {

// Running observation normalizer. Statistics accumulate in double via
// Welford updates in a fixed order; the normalized output feeds the nets.
// During training it is frozen for the duration of one iteration (collection
// and optimization see identical inputs) and updated between iterations; at
// evaluation it stays frozen.
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim)
      : count_(0.0), mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }

  Eigen::VectorXd variance() const {
    if (count_ < 2.0) return Eigen::VectorXd::Ones(mean_.size());
    return (m2_ / count_).cwiseMax(1e-12);
  }

  void update(const double* row) {
    count_ += 1.0;
    for (int d = 0; d < dim(); ++d) {
      const double delta = row[d] - mean_[d];
      mean_[d] += delta / count_;
      m2_[d] += delta * (row[d] - mean_[d]);
    }
  }

  // rows x dim, row-major.
  void update_batch(const double* data, Eigen::Index rows) {
    for (Eigen::Index r = 0; r < rows; ++r) update(data + r * dim());
  }

  template <class Real>
  void normalize(const double* in, Real* out) const {
    if (count_ < 2.0) {
      for (int d = 0; d < dim(); ++d)
        out[d] = static_cast<Real>(std::clamp(in[d], -10.0, 10.0));
      return;
    }
    for (int d = 0; d < dim(); ++d) {
      const double var = std::max(m2_[d] / count_, 1e-12);
      const double z = (in[d] - mean_[d]) / std::sqrt(var + 1e-8);
      out[d] = static_cast<Real>(std::clamp(z, -10.0, 10.0));
    }
  }

  void set_state(double count, Eigen::VectorXd mean, Eigen::VectorXd m2) {
    count_ = count;
    mean_ = std::move(mean);
    m2_ = std::move(m2);
  }
  const Eigen::VectorXd& m2() const { return m2_; }

 private:
  double count_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

}  // namespace swingshot
