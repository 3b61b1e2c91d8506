#include "fungrasp/randomization.hpp"

#include <cmath>
#include <random>

#include "fungrasp/error.hpp"
#include "json_util.hpp"

namespace fungrasp {

namespace {

void check_fraction(double f, const char* what) {
  if (!(f >= 0.0 && f < 1.0)) throw ValidationError(std::string(what) + " fraction must lie in [0, 1)");
}

void check_range(const AbsoluteRange& r, const char* what) {
  if (!std::isfinite(r.lower) || !std::isfinite(r.upper) || r.lower > r.upper)
    throw ValidationError(std::string(what) + " bounds must be finite and ordered");
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::VectorXd sample_vector(std::mt19937_64& rng, const RelativeVectorRange& r) {
  Eigen::VectorXd out(r.nominal.size());
  for (Eigen::Index i = 0; i < r.nominal.size(); ++i)
    out[i] = r.nominal[i] * (1.0 + uniform(rng, -r.fraction, r.fraction));
  return out;
}

using detail::json;

RelativeVectorRange read_vector_range(const json& j, const std::string& ctx) {
  detail::require_keys_subset(j, {"nominal", "fraction"}, ctx);
  RelativeVectorRange r;
  const json& nominal = detail::require(j, "nominal", ctx);
  if (!nominal.is_array()) throw ParseError(ctx + ".nominal: expected an array");
  r.nominal.resize(static_cast<Eigen::Index>(nominal.size()));
  for (std::size_t i = 0; i < nominal.size(); ++i)
    r.nominal[static_cast<Eigen::Index>(i)] = detail::read_number(nominal[i], ctx + ".nominal");
  if (j.contains("fraction")) r.fraction = detail::read_number(j["fraction"], ctx + ".fraction");
  return r;
}

RelativeRange read_relative(const json& j, const std::string& ctx) {
  detail::require_keys_subset(j, {"nominal", "fraction"}, ctx);
  RelativeRange r;
  r.nominal = detail::read_number(detail::require(j, "nominal", ctx), ctx + ".nominal");
  if (j.contains("fraction")) r.fraction = detail::read_number(j["fraction"], ctx + ".fraction");
  return r;
}

AbsoluteRange read_absolute(const json& j, const std::string& ctx) {
  detail::require_keys_subset(j, {"lower", "upper"}, ctx);
  return {detail::read_number(detail::require(j, "lower", ctx), ctx + ".lower"),
          detail::read_number(detail::require(j, "upper", ctx), ctx + ".upper")};
}

json write_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

void RandomizationConfig::validate() const {
  check_fraction(damping.fraction, "damping");
  check_fraction(kp.fraction, "kp");
  check_fraction(kd.fraction, "kd");
  check_fraction(object_mass.fraction, "object_mass");
  check_range(friction, "friction");
  check_range(table_height, "table_height");
  check_range(observation_noise, "observation_noise");
  if (friction.lower < 0.0) throw ValidationError("friction must be nonnegative");
  if (observation_noise.lower < 0.0) throw ValidationError("observation_noise must be nonnegative");
  if (!(object_mass.nominal >= 0.0)) throw ValidationError("object_mass must be nonnegative");
  for (const auto* v : {&damping.nominal, &kp.nominal, &kd.nominal})
    if (!v->allFinite() || (v->array() < 0.0).any()) throw ValidationError("nominal gains must be finite and nonnegative");
}

RandomizationSample sample_randomization(const RandomizationConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  RandomizationSample s;
  s.damping = sample_vector(rng, config.damping);
  s.kp = sample_vector(rng, config.kp);
  s.kd = sample_vector(rng, config.kd);
  s.friction = uniform(rng, config.friction.lower, config.friction.upper);
  s.object_mass =
      config.object_mass.nominal * (1.0 + uniform(rng, -config.object_mass.fraction, config.object_mass.fraction));
  s.table_height = uniform(rng, config.table_height.lower, config.table_height.upper);
  s.observation_noise = uniform(rng, config.observation_noise.lower, config.observation_noise.upper);
  return s;
}

RandomizationConfig parse_randomization_config(std::string_view text) {
  const std::string ctx = "randomization config";
  const json j = detail::parse_json(text, ctx);
  if (!j.is_object()) throw ParseError(ctx + ": expected an object");
  detail::require_keys_subset(
      j, {"damping", "kp", "kd", "friction", "object_mass", "table_height", "observation_noise"}, ctx);
  RandomizationConfig c;
  if (j.contains("damping")) c.damping = read_vector_range(j["damping"], "damping");
  if (j.contains("kp")) c.kp = read_vector_range(j["kp"], "kp");
  if (j.contains("kd")) c.kd = read_vector_range(j["kd"], "kd");
  if (j.contains("friction")) c.friction = read_absolute(j["friction"], "friction");
  if (j.contains("object_mass")) c.object_mass = read_relative(j["object_mass"], "object_mass");
  if (j.contains("table_height")) c.table_height = read_absolute(j["table_height"], "table_height");
  if (j.contains("observation_noise")) c.observation_noise = read_absolute(j["observation_noise"], "observation_noise");
  c.validate();
  return c;
}

RandomizationConfig load_randomization_config(const std::filesystem::path& path) {
  return parse_randomization_config(detail::read_text_file(path));
}

std::string serialize_randomization_config(const RandomizationConfig& c) {
  json j;
  j["damping"] = {{"nominal", write_vector(c.damping.nominal)}, {"fraction", c.damping.fraction}};
  j["kp"] = {{"nominal", write_vector(c.kp.nominal)}, {"fraction", c.kp.fraction}};
  j["kd"] = {{"nominal", write_vector(c.kd.nominal)}, {"fraction", c.kd.fraction}};
  j["friction"] = {{"lower", c.friction.lower}, {"upper", c.friction.upper}};
  j["object_mass"] = {{"nominal", c.object_mass.nominal}, {"fraction", c.object_mass.fraction}};
  j["table_height"] = {{"lower", c.table_height.lower}, {"upper", c.table_height.upper}};
  j["observation_noise"] = {{"lower", c.observation_noise.lower}, {"upper", c.observation_noise.upper}};
  return j.dump(2) + "\n";
}

std::string serialize_randomization_sample(const RandomizationSample& s) {
  json j;
  j["damping"] = write_vector(s.damping);
  j["kp"] = write_vector(s.kp);
  j["kd"] = write_vector(s.kd);
  j["friction"] = s.friction;
  j["object_mass"] = s.object_mass;
  j["table_height"] = s.table_height;
  j["observation_noise"] = s.observation_noise;
  return j.dump(2) + "\n";
}

}  // namespace fungrasp
