#include <doctest.h>

#include "fungrasp/error.hpp"
#include "fungrasp/randomization.hpp"

using namespace fungrasp;

namespace {

RandomizationConfig base_config() {
  RandomizationConfig c;
  c.damping = {Eigen::Vector3d(0.1, 0.2, 0.3), 0.0};
  c.kp = {Eigen::Vector3d(2.0, 3.0, 4.0), 0.0};
  c.kd = {Eigen::Vector3d(0.05, 0.05, 0.05), 0.0};
  c.friction = {0.7, 0.7};
  c.object_mass = {0.25, 0.0};
  c.table_height = {0.02, 0.02};
  c.observation_noise = {0.0, 0.0};
  return c;
}

}  // namespace

TEST_SUITE("randomization") {
  TEST_CASE("zero ranges return nominal values") {
    const RandomizationConfig c = base_config();
    const RandomizationSample s = sample_randomization(c, 123);
    CHECK(s.damping == c.damping.nominal);
    CHECK(s.kp == c.kp.nominal);
    CHECK(s.kd == c.kd.nominal);
    CHECK(s.friction == 0.7);
    CHECK(s.object_mass == 0.25);
    CHECK(s.table_height == 0.02);
    CHECK(s.observation_noise == 0.0);
  }

  TEST_CASE("damping within twenty percent") {
    RandomizationConfig c = base_config();
    c.damping.fraction = 0.2;
    const Eigen::VectorXd nominal = c.damping.nominal;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, 1e9), hi = Eigen::VectorXd::Constant(3, -1e9);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd d = sample_randomization(c, static_cast<std::uint64_t>(i)).damping;
      lo = lo.cwiseMin(d);
      hi = hi.cwiseMax(d);
      sum += d;
    }
    for (int j = 0; j < 3; ++j) {
      CHECK(lo[j] >= 0.8 * nominal[j]);
      CHECK(hi[j] <= 1.2 * nominal[j]);
      CHECK(lo[j] < 0.81 * nominal[j]);
      CHECK(hi[j] > 1.19 * nominal[j]);
      CHECK(std::abs(sum[j] / n - nominal[j]) < 0.01 * nominal[j]);
    }
  }

  TEST_CASE("fixed seed repeats") {
    RandomizationConfig c = base_config();
    c.kp.fraction = 0.3;
    c.friction = {0.5, 1.2};
    c.table_height = {-0.05, 0.05};
    c.observation_noise = {0.0, 0.01};
    const auto a = sample_randomization(c, 77);
    const auto b = sample_randomization(c, 77);
    const auto other = sample_randomization(c, 78);
    CHECK(serialize_randomization_sample(a) == serialize_randomization_sample(b));
    CHECK(serialize_randomization_sample(a) != serialize_randomization_sample(other));
    CHECK(a.friction >= 0.5);
    CHECK(a.friction <= 1.2);
  }

  TEST_CASE("config round trip and validation") {
    RandomizationConfig c = base_config();
    c.kd.fraction = 0.1;
    const RandomizationConfig back = parse_randomization_config(serialize_randomization_config(c));
    CHECK(back.kd.nominal == c.kd.nominal);
    CHECK(back.kd.fraction == 0.1);
    CHECK(back.table_height.lower == 0.02);

    RandomizationConfig bad = c;
    bad.damping.fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = c;
    bad.friction = {1.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(parse_randomization_config("{\"damping\": 3}"), Error);
  }
}
