#include "qel/optimize.hpp"

#include <cmath>
#include <stdexcept>

namespace qel {

void OptimizerConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("optimizer lr must be > 0");
  if (epochs < 1) throw std::invalid_argument("optimizer epochs must be >= 1");
}

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> gradient,
               const OptimizerConfig& config) {
  if (params.size() != gradient.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  for (double g : gradient) {
    if (!std::isfinite(g)) throw std::invalid_argument("adam_step: non-finite gradient");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * gradient[i];
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * gradient[i] * gradient[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= config.lr * mhat / (std::sqrt(vhat) + config.epsilon);
  }
}

void LbfgsState::step(std::span<double> params, std::span<const double> gradient,
                      double lr) {
  if (params.size() != n_ || gradient.size() != n_) {
    throw std::invalid_argument("lbfgs step: shape mismatch");
  }

  if (!prev_params_.empty()) {
    std::vector<double> s(n_), y(n_);
    double sy = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      s[i] = params[i] - prev_params_[i];
      y[i] = gradient[i] - prev_grad_[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12 && history_ > 0) {
      s_.push_back(std::move(s));
      y_.push_back(std::move(y));
      if (s_.size() > history_) {
        s_.pop_front();
        y_.pop_front();
      }
    }
  }
  prev_params_.assign(params.begin(), params.end());
  prev_grad_.assign(gradient.begin(), gradient.end());

  // two-loop recursion
  std::vector<double> q(gradient.begin(), gradient.end());
  const std::size_t m = s_.size();
  std::vector<double> alpha(m), rho(m);
  for (std::size_t i = m; i-- > 0;) {
    double sy = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      sy += s_[i][j] * y_[i][j];
      sq += s_[i][j] * q[j];
    }
    rho[i] = 1.0 / sy;
    alpha[i] = rho[i] * sq;
    for (std::size_t j = 0; j < n_; ++j) q[j] -= alpha[i] * y_[i][j];
  }
  double gamma = 1.0;
  if (m > 0) {
    double sy = 0.0, yy = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      sy += s_[m - 1][j] * y_[m - 1][j];
      yy += y_[m - 1][j] * y_[m - 1][j];
    }
    if (yy > 0.0) gamma = sy / yy;
  }
  for (double& v : q) v *= gamma;
  for (std::size_t i = 0; i < m; ++i) {
    double yr = 0.0;
    for (std::size_t j = 0; j < n_; ++j) yr += y_[i][j] * q[j];
    const double beta = rho[i] * yr;
    for (std::size_t j = 0; j < n_; ++j) q[j] += s_[i][j] * (alpha[i] - beta);
  }

  for (std::size_t j = 0; j < n_; ++j) params[j] -= lr * q[j];
}

}  // namespace qel
