#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace fungrasp {

struct CmaesConfig {
  int population = 0;  // 0: 4 + floor(3 ln n)
  double sigma0 = 0.3;
  int max_gens = 300;
  std::uint64_t seed = 0;
  // Optional box. Samples outside are evaluated at their projection plus
  // bound_penalty * squared distance.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double bound_penalty = 1e3;
  std::optional<double> target_loss;  // stop once best <= target
  double tol_x = 1e-16;               // stop when sigma * max axis length falls below

  int lambda(std::size_t n) const;
  void validate(std::size_t n) const;
};

struct CmaesResult {
  Eigen::VectorXd x_best;
  double loss_best = 0.0;
  std::vector<double> history;  // best-so-far loss after each generation
  std::vector<double> sigma;    // step size after each generation
  int evaluations = 0;
  int generations = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// (mu/mu_w, lambda) CMA-ES with cumulative step-size adaptation and rank-one
/// plus rank-mu covariance updates. Population members are evaluated through
/// parallel_for, so `f` must be thread-safe. Deterministic for a given seed.
/// Throws NumericalError if f(x0) is not finite.
CmaesResult cmaes_minimize(const Objective& f, const CmaesConfig& config, const Eigen::VectorXd& x0);

}  // namespace fungrasp
