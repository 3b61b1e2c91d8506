#include <doctest.h>

#include <random>

#include "fungrasp/error.hpp"
#include "fungrasp/metrics.hpp"

using namespace fungrasp;

namespace {

// object height per record at 10 Hz
JointTrajectory lift_profile(const std::vector<double>& z) {
  JointTrajectory t;
  for (std::size_t k = 0; k < z.size(); ++k) {
    t.push_back(k * 0.1, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    Pose6D p;
    p.position = Vec3(0, 0, z[k]);
    t.object_poses.push_back(p);
  }
  return t;
}

std::vector<double> lifted(double height, int lift_ticks, int hold_ticks) {
  std::vector<double> z(static_cast<std::size_t>(lift_ticks), 0.025);
  z.resize(z.size() + static_cast<std::size_t>(hold_ticks), 0.025 + height);
  return z;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("success") {
    CHECK(metric_success(lift_profile(lifted(0.12, 10, 41))));
    CHECK_FALSE(metric_success(lift_profile(lifted(0.05, 10, 41))));

    auto z = lifted(0.15, 10, 20);  // 2 s up, then it falls
    z.resize(z.size() + 20, 0.025);
    CHECK_FALSE(metric_success(lift_profile(z)));

    CHECK(metric_success(lift_profile(lifted(0.12, 10, 31))));    // exactly 3 s
    CHECK_FALSE(metric_success(lift_profile(lifted(0.12, 10, 30))));  // 2.9 s
    CHECK(metric_success(lift_profile(lifted(0.05, 10, 30)), 0.04, 2.0));

    JointTrajectory bare;
    bare.push_back(0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    CHECK_THROWS_AS(metric_success(bare), ValidationError);
  }

  TEST_CASE("simd") {
    CHECK(metric_simd(lift_profile(std::vector<double>(20, 0.3))) == 0.0);
    std::vector<double> z;
    for (int k = 0; k < 20; ++k) z.push_back(0.001 * k);
    CHECK(metric_simd(lift_profile(z)) == doctest::Approx(10.0));

    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0, 1e-3);
    JointTrajectory walk;
    Vec3 p = Vec3::Zero();
    double t = 0.0;
    std::vector<Vec3> ps;
    std::vector<double> ts;
    for (int k = 0; k < 60; ++k) {
      t += 0.05 + 0.01 * (k % 3);
      p += Vec3(n(rng), n(rng), n(rng));
      walk.push_back(t, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
      Pose6D pose;
      pose.position = p;
      walk.object_poses.push_back(pose);
      ps.push_back(p);
      ts.push_back(t);
    }
    for (double start : {0.0, 1.0}) {
      double sum = 0.0;
      int steps = 0;
      for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
        if (ts[k] < start) continue;
        sum += (ps[k + 1] - ps[k]).norm() / (ts[k + 1] - ts[k]) * 1000.0;
        ++steps;
      }
      CHECK(metric_simd(walk, start) == doctest::Approx(sum / steps).epsilon(1e-12));
    }
    CHECK_THROWS_AS(metric_simd(walk, 100.0), ValidationError);
  }

  TEST_CASE("contact ratio") {
    RobotGrasp ref;
    ref.link_contacts = {true, true, false, true};
    JointTrajectory t;
    for (int k = 0; k < 10; ++k) {
      t.push_back(k * 0.1, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
      t.contact_flags.push_back({true, true, true, true});
    }
    CHECK(metric_contact_ratio(t, ref) == 1.0);

    RobotGrasp two;
    two.link_contacts = {true, true, false, false};
    for (auto& c : t.contact_flags) c = {true, false, false, false};
    CHECK(metric_contact_ratio(t, two) == 0.5);

    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.5);
    for (auto& c : t.contact_flags)
      for (std::size_t i = 0; i < 4; ++i) c[i] = coin(rng);
    double expected = 0.0;
    int records = 0;
    for (std::size_t k = 3; k < t.size(); ++k, ++records) {
      int hit = 0;
      for (std::size_t i = 0; i < 4; ++i) hit += ref.link_contacts[i] && t.contact_flags[k][i];
      expected += hit / 3.0;
    }
    const double ratio = metric_contact_ratio(t, ref, 0.3 - 1e-9);
    CHECK(ratio == doctest::Approx(expected / records).epsilon(1e-12));

    // adding achieved contacts never lowers the ratio
    for (auto& c : t.contact_flags) c[1] = true;
    CHECK(metric_contact_ratio(t, ref, 0.3 - 1e-9) >= ratio);

    RobotGrasp empty;
    empty.link_contacts.assign(4, false);
    CHECK(metric_contact_ratio(t, empty) == 0.0);
  }
}
