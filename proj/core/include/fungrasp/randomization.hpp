#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace fungrasp {

/// nominal * (1 + u), u ~ U[-fraction, fraction].
struct RelativeRange {
  double nominal = 0.0;
  double fraction = 0.0;
};

/// Per-joint relative range sharing one fraction.
struct RelativeVectorRange {
  Eigen::VectorXd nominal;
  double fraction = 0.0;
};

struct AbsoluteRange {
  double lower = 0.0;
  double upper = 0.0;
};

struct RandomizationConfig {
  RelativeVectorRange damping;
  RelativeVectorRange kp;
  RelativeVectorRange kd;
  AbsoluteRange friction{0.8, 0.8};
  RelativeRange object_mass{0.1, 0.0};
  AbsoluteRange table_height{0.0, 0.0};
  AbsoluteRange observation_noise{0.0, 0.0};  // sigma of the hand-state noise, rad

  /// Fractions in [0, 1), ordered bounds, nonnegative noise, friction and mass.
  void validate() const;
};

struct RandomizationSample {
  Eigen::VectorXd damping;
  Eigen::VectorXd kp;
  Eigen::VectorXd kd;
  double friction = 0.0;
  double object_mass = 0.0;
  double table_height = 0.0;
  double observation_noise = 0.0;
};

/// Independent uniform draws in a fixed order from a generator seeded with `seed`.
RandomizationSample sample_randomization(const RandomizationConfig& config, std::uint64_t seed);

RandomizationConfig parse_randomization_config(std::string_view text);
RandomizationConfig load_randomization_config(const std::filesystem::path& path);
std::string serialize_randomization_config(const RandomizationConfig& config);
std::string serialize_randomization_sample(const RandomizationSample& sample);

}  // namespace fungrasp
