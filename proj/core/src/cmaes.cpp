#include "fungrasp/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "fungrasp/error.hpp"
#include "fungrasp/log.hpp"
#include "fungrasp/parallel.hpp"

namespace fungrasp {

int CmaesConfig::lambda(std::size_t n) const {
  if (population > 0) return population;
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

void CmaesConfig::validate(std::size_t n) const {
  if (n == 0) throw ValidationError("CMA-ES needs at least one parameter");
  if (lambda(n) < 4) throw ValidationError("CMA-ES population must be at least 4");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ValidationError("CMA-ES sigma0 must be positive");
  if (max_gens < 1) throw ValidationError("CMA-ES max_gens must be at least 1");
  if (lower.size() != upper.size()) throw ValidationError("CMA-ES bounds must come in pairs");
  if (lower.size() != 0) {
    if (static_cast<std::size_t>(lower.size()) != n) throw ValidationError("CMA-ES bounds do not match x0");
    if ((lower.array() > upper.array()).any()) throw ValidationError("CMA-ES bounds must be ordered");
  }
  if (!(bound_penalty >= 0.0)) throw ValidationError("CMA-ES bound penalty must be nonnegative");
}

CmaesResult cmaes_minimize(const Objective& f, const CmaesConfig& config, const Eigen::VectorXd& x0) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const auto n = static_cast<std::size_t>(x0.size());
  config.validate(n);
  const bool bounded = config.lower.size() != 0;
  const auto nd = static_cast<double>(n);

  auto penalized = [&](const VectorXd& x) {
    if (!bounded) return f(x);
    const VectorXd p = x.cwiseMax(config.lower).cwiseMin(config.upper);
    return f(p) + config.bound_penalty * (x - p).squaredNorm();
  };
  auto feasible = [&](const VectorXd& x) -> VectorXd {
    return bounded ? VectorXd(x.cwiseMax(config.lower).cwiseMin(config.upper)) : x;
  };

  CmaesResult result;
  result.x_best = feasible(x0);
  result.loss_best = penalized(x0);
  result.evaluations = 1;
  if (!std::isfinite(result.loss_best)) throw NumericalError("CMA-ES objective is not finite at x0");

  const int lambda = config.lambda(n);
  const int mu = lambda / 2;
  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
  const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
  const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

  VectorXd mean = x0;
  double sigma = config.sigma0;
  VectorXd pc = VectorXd::Zero(x0.size());
  VectorXd ps = VectorXd::Zero(x0.size());
  MatrixXd c = MatrixXd::Identity(x0.size(), x0.size());
  MatrixXd b = MatrixXd::Identity(x0.size(), x0.size());
  VectorXd d = VectorXd::Ones(x0.size());

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<VectorXd> xs(static_cast<std::size_t>(lambda));
  std::vector<VectorXd> ys(static_cast<std::size_t>(lambda));
  std::vector<double> fs(static_cast<std::size_t>(lambda));
  std::vector<int> order(static_cast<std::size_t>(lambda));

  for (int gen = 1; gen <= config.max_gens; ++gen) {
    for (int k = 0; k < lambda; ++k) {
      VectorXd z(x0.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
      ys[k] = b * d.asDiagonal() * z;
      xs[k] = mean + sigma * ys[k];
    }
    parallel_for(static_cast<std::size_t>(lambda), [&](std::size_t k) { fs[k] = penalized(xs[k]); });
    result.evaluations += lambda;

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int bb) {
      // NaN ranks last
      if (std::isnan(fs[a])) return false;
      if (std::isnan(fs[bb])) return true;
      return fs[a] < fs[bb];
    });
    if (fs[order[0]] < result.loss_best) {
      result.loss_best = fs[order[0]];
      result.x_best = feasible(xs[order[0]]);
    }

    VectorXd y_w = VectorXd::Zero(x0.size());
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    mean += sigma * y_w;

    const VectorXd c_inv_sqrt_yw = b * d.cwiseInverse().asDiagonal() * b.transpose() * y_w;
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * c_inv_sqrt_yw;
    const double ps_norm = ps.norm();
    const bool hsig =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen)) / chi_n < 1.4 + 2.0 / (nd + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

    MatrixXd rank_mu = MatrixXd::Zero(x0.size(), x0.size());
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * ys[order[i]] * ys[order[i]].transpose();
    c = (1.0 - c1 - cmu) * c + c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * c) + cmu * rank_mu;
    c = 0.5 * (c + c.transpose());
    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c);
    if (eig.info() != Eigen::Success) throw NumericalError("CMA-ES covariance decomposition failed");
    b = eig.eigenvectors();
    d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();

    result.history.push_back(result.loss_best);
    result.sigma.push_back(sigma);
    result.generations = gen;
    if (!std::isfinite(sigma) || !mean.allFinite()) throw NumericalError("CMA-ES state diverged");
    if (config.target_loss && result.loss_best <= *config.target_loss) break;
    if (sigma * d.maxCoeff() < config.tol_x) {
      logger().debug("CMA-ES step size below tolerance at generation {}", gen);
      break;
    }
    if (d.maxCoeff() > 1e7 * std::max(d.minCoeff(), 1e-300)) {
      logger().debug("CMA-ES covariance ill-conditioned at generation {}", gen);
      break;
    }
  }
  return result;
}

}  // namespace fungrasp
