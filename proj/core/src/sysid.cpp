#include "fungrasp/sysid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fungrasp/error.hpp"
#include "json_util.hpp"

namespace fungrasp {

double trajectory_sq_error(const JointTrajectory& a, const JointTrajectory& b) {
  if (a.size() != b.size()) throw ValidationError("trajectories have different lengths");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a.q_measured[t].size() != b.q_measured[t].size()) throw ValidationError("trajectory joint counts differ");
    sum += (a.q_measured[t] - b.q_measured[t]).squaredNorm();
  }
  return sum;
}

double sim_real_loss(const RobotHandModel& model, const ActuatorParams& params, const SimConfig& config,
                     const JointTrajectory& real) {
  if (real.empty()) throw ValidationError("real trajectory is empty");
  if (real.dof() != model.dof())
    throw ValidationError("trajectory has " + std::to_string(real.dof()) + " joints, model has " +
                          std::to_string(model.dof()));
  const JointTrajectory sim = rollout(model, params, config, real.q_measured.front(), real.q_commanded);
  return trajectory_sq_error(sim, real);
}

void SysidSearchSpace::validate() const {
  if (!(stiffness_lower > 0.0) || !(damping_lower > 0.0) || !(stiffness_lower <= stiffness_upper) ||
      !(damping_lower <= damping_upper) || !std::isfinite(stiffness_upper) || !std::isfinite(damping_upper))
    throw ValidationError("sysid search bounds must be positive, finite and ordered");
}

SysidResult identify(const RobotHandModel& model, const JointTrajectory& real, const CmaesConfig& cmaes,
                     const SimConfig& sim_config, const SysidOptions& options) {
  options.space.validate();
  real.validate();
  if (real.empty()) throw ValidationError("real trajectory is empty");
  if (real.dof() != model.dof()) throw ValidationError("trajectory joint count does not match the model");
  sim_config.validate(model.dof());

  const auto m = static_cast<Eigen::Index>(model.dof());
  const Eigen::Index half = options.mode == SysidMode::Tied ? 1 : m;
  const Eigen::Index n = 2 * half;

  Eigen::VectorXd lo(n);
  Eigen::VectorXd span(n);
  lo.head(half).setConstant(std::log(options.space.stiffness_lower));
  lo.tail(half).setConstant(std::log(options.space.damping_lower));
  span.head(half).setConstant(std::log(options.space.stiffness_upper) - std::log(options.space.stiffness_lower));
  span.tail(half).setConstant(std::log(options.space.damping_upper) - std::log(options.space.damping_lower));

  auto decode = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd logp = lo + span.cwiseProduct(z);
    ActuatorParams p;
    if (half == 1) {
      p = ActuatorParams::uniform(model.dof(), std::exp(logp[0]), std::exp(logp[1]));
    } else {
      p.stiffness = logp.head(half).array().exp();
      p.damping = logp.tail(half).array().exp();
    }
    return p;
  };

  CmaesConfig cfg = cmaes;
  cfg.lower = Eigen::VectorXd::Zero(n);
  cfg.upper = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd z0 = Eigen::VectorXd::Constant(n, 0.5);
  const CmaesResult res = cmaes_minimize(
      [&](const Eigen::VectorXd& z) { return sim_real_loss(model, decode(z), sim_config, real); }, cfg, z0);

  SysidResult out;
  out.params = decode(res.x_best);
  out.best_loss = res.loss_best;
  out.loss_per_gen = res.history;
  out.evaluations = res.evaluations;
  return out;
}

std::vector<Eigen::VectorXd> multisine_commands(const RobotHandModel& model, double duration, double control_hz,
                                                std::uint64_t seed, int components, double f_min, double f_max,
                                                double amplitude_fraction) {
  if (!(duration > 0.0) || !(control_hz > 0.0)) throw ValidationError("duration and control_hz must be positive");
  if (components < 1 || !(f_min > 0.0) || !(f_max >= f_min)) throw ValidationError("invalid multi-sine spectrum");
  const auto m = static_cast<Eigen::Index>(model.dof());
  const Eigen::VectorXd lower = model.lower_limits();
  const Eigen::VectorXd upper = model.upper_limits();

  std::vector<double> freqs(static_cast<std::size_t>(components));
  for (int c = 0; c < components; ++c) {
    const double s = components == 1 ? 0.0 : static_cast<double>(c) / (components - 1);
    freqs[static_cast<std::size_t>(c)] = f_min * std::pow(f_max / f_min, s);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  Eigen::MatrixXd phases(m, components);
  for (Eigen::Index j = 0; j < m; ++j)
    for (int c = 0; c < components; ++c) phases(j, c) = phase_dist(rng);

  const auto ticks = static_cast<std::size_t>(std::llround(duration * control_hz));
  std::vector<Eigen::VectorXd> commands(ticks, Eigen::VectorXd(m));
  for (std::size_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) / control_hz;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double center = 0.5 * (lower[j] + upper[j]);
      const double amp = amplitude_fraction * 0.5 * (upper[j] - lower[j]) / components;
      double v = 0.0;
      for (int c = 0; c < components; ++c)
        v += std::sin(2.0 * std::numbers::pi * freqs[static_cast<std::size_t>(c)] * t + phases(j, c));
      commands[k][j] = center + amp * v;
    }
  }
  return commands;
}

JointTrajectory add_measurement_noise(JointTrajectory traj, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("noise sigma must be nonnegative");
  if (sigma == 0.0) return traj;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& q : traj.q_measured)
    for (Eigen::Index j = 0; j < q.size(); ++j) q[j] += noise(rng);
  return traj;
}

std::string serialize_actuator_params(const ActuatorParams& params) {
  detail::json j;
  j["stiffness"] = std::vector<double>(params.stiffness.data(), params.stiffness.data() + params.stiffness.size());
  j["damping"] = std::vector<double>(params.damping.data(), params.damping.data() + params.damping.size());
  return j.dump(2) + "\n";
}

ActuatorParams parse_actuator_params(std::string_view text) {
  const std::string ctx = "actuator params";
  const detail::json j = detail::parse_json(text, ctx);
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  detail::require_keys_subset(j, {"stiffness", "damping"}, ctx);
  auto read = [&](const char* key) {
    const detail::json& a = detail::require(j, key, ctx);
    if (!a.is_array()) throw ParseError(ctx + "." + key + ": expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = detail::read_number(a[i], ctx);
    return v;
  };
  ActuatorParams p{read("stiffness"), read("damping")};
  p.validate(static_cast<std::size_t>(p.stiffness.size()));
  return p;
}

std::string generation_csv(const SysidResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "generation,best_loss\n";
  for (std::size_t g = 0; g < result.loss_per_gen.size(); ++g) out << g + 1 << ',' << result.loss_per_gen[g] << '\n';
  return out.str();
}

}  // namespace fungrasp
