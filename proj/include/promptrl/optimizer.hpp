#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace promptrl {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

struct OptimizerState {
  std::uint64_t t = 0;
  std::vector<Eigen::Index> indices;
  Eigen::VectorXd m, v;
};

// Adam with decoupled weight decay over a fixed subset of a flat parameter
// vector. Moments are kept only for that subset.
class AdamW {
 public:
  AdamW(std::vector<Eigen::Index> indices, AdamConfig config) : config_(config) {
    state_.indices = std::move(indices);
    const auto n = static_cast<Eigen::Index>(state_.indices.size());
    state_.m = Eigen::VectorXd::Zero(n);
    state_.v = Eigen::VectorXd::Zero(n);
  }

  AdamW(OptimizerState state, AdamConfig config) : config_(config), state_(std::move(state)) {
    const auto n = static_cast<Eigen::Index>(state_.indices.size());
    if (state_.m.size() != n || state_.v.size() != n) throw std::invalid_argument("AdamW: inconsistent state");
  }

  template <typename Scalar>
  void step(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& params, const Eigen::VectorXd& grad, double lr) {
    ++state_.t;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state_.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state_.t));
    for (std::size_t j = 0; j < state_.indices.size(); ++j) {
      const auto k = state_.indices[j];
      const auto jj = static_cast<Eigen::Index>(j);
      const double g = grad(k);
      state_.m(jj) = b1 * state_.m(jj) + (1.0 - b1) * g;
      state_.v(jj) = b2 * state_.v(jj) + (1.0 - b2) * g * g;
      const double mhat = state_.m(jj) / c1;
      const double vhat = state_.v(jj) / c2;
      double p = static_cast<double>(params(k));
      p -= lr * (mhat / (std::sqrt(vhat) + config_.eps) + config_.weight_decay * p);
      params(k) = static_cast<Scalar>(p);
    }
  }

  const OptimizerState& state() const { return state_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  OptimizerState state_;
};

}  // namespace promptrl
