// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "fungrasp/cmaes.hpp"
#include "fungrasp/contacts.hpp"
#include "fungrasp/dynamics.hpp"
#include "fungrasp/kinematics.hpp"
#include "fungrasp/log.hpp"
#include "fungrasp/metrics.hpp"
#include "fungrasp/randomization.hpp"
#include "fungrasp/retarget.hpp"
#include "fungrasp/rewards.hpp"
#include "fungrasp/sysid.hpp"
#include "fungrasp/trajectory.hpp"
#include "process.hpp"

using namespace fungrasp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Eigen::VectorXd random_q(const RobotHandModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::VectorXd lo = m.lower_limits(), hi = m.upper_limits();
  Eigen::VectorXd q(m.dof());
  for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = lo[j] + u(rng) * (hi[j] - lo[j]);
  return q;
}

Eigen::Quaterniond random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized();
}

// RMSE over contact-flagged mapped joints between the human keypoints and the robot links.
double contact_rmse(const RobotHandModel& m, const HumanGrasp& h, const RobotGrasp& g) {
  const LinkFrames frames = compute_link_frames(m, g.wrist_pose.isometry(), g.joint_angles);
  double sum = 0.0;
  int n = 0;
  for (const auto& [link, joint] : m.mapped_links()) {
    if (!h.contacts[static_cast<std::size_t>(joint)]) continue;
    sum += (h.joints[static_cast<std::size_t>(joint)] - frames[link].translation()).squaredNorm();
    ++n;
  }
  return n == 0 ? 0.0 : std::sqrt(sum / n);
}

// ---------------------------------------------------------------------------

Outcome self_retarget() {
  const RobotHandModel& m = fixtures::allegro();
  std::mt19937_64 rng(101);
  std::bernoulli_distribution coin(0.6);
  double worst_rmse = 0.0, worst_time = 0.0;
  int flag_mismatch = 0;
  const int trials = 10;
  for (int trial = 0; trial <= trials; ++trial) {
    Pose6D wrist;
    Eigen::VectorXd q;
    std::vector<bool> contacts;
    if (trial == trials) {
      // the cube grasp itself, fingertips 1 mm off the faces
      const auto& cg = fixtures::cube_grasp();
      wrist = cg.wrist;
      q = cg.q;
      contacts = cg.contacts;
    } else {
      wrist.rotation = random_rotation(rng);
      wrist.position = Vec3(0.5, 0.0, 0.0) + 0.05 * Vec3::Random();
      q = random_q(m, rng);
      contacts.resize(m.contact_links().size());
      for (std::size_t i = 0; i < contacts.size(); ++i) contacts[i] = coin(rng);
      contacts[0] = true;
    }
    const HumanGrasp h = fixtures::human_from_robot(m, wrist, q, contacts);
    const auto t0 = Clock::now();
    const RetargetResult r = optimize_grasp(m, h, fixtures::cube(), RetargetWeights{});
    worst_time = std::max(worst_time, seconds_since(t0));
    worst_rmse = std::max(worst_rmse, contact_rmse(m, h, r.grasp));
    if (r.grasp.link_contacts != contacts) ++flag_mismatch;
  }
  return {worst_rmse < 1e-3 && flag_mismatch == 0 && worst_time < 30.0,
          fmt::format("{} poses, worst contact RMSE {:.3g} mm, flag mismatches {}, slowest {:.2f} s", trials + 1,
                      worst_rmse * 1e3, flag_mismatch, worst_time)};
}

Outcome geometric_retarget() {
  const RobotHandModel& m = fixtures::allegro();
  const HumanGrasp h = load_human_grasp(fixtures::data_path("grasps/cube_human.json"));
  const RetargetResult r = optimize_grasp(m, h, fixtures::cube(), RetargetWeights{});
  const double pen = loss_pen(m, r.grasp, fixtures::cube());
  const double joints = loss_joints(m, r.grasp.joint_angles);
  const auto derived =
      derive_contacts(m, r.grasp.wrist_pose, r.grasp.joint_angles, fixtures::cube(), Pose6D{}, kDefaultContactThreshold);
  std::vector<bool> target(m.contact_links().size());
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = h.contacts[static_cast<std::size_t>(m.human_map().at(m.link(m.contact_links()[i]).name))];
  const double pen0 = r.loss_history.front().terms.pen;
  return {pen < 1e-6 && joints == 0.0 && derived == target && target.size() == 4,
          fmt::format("L_pen {:.3g} -> {:.3g}, L_joints {:.3g}, contacts {}", pen0, pen, joints,
                      derived == target ? "reproduced" : "differ")};
}

// Central differences with h and h/10 agree on smooth configurations; where
// they do not, the point sits on a kink of a max() or a nearest-feature switch.
struct GradientCheck {
  double worst = 0.0;
  int kinks = 0;
};

bool smooth(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() <= 1e-5 * std::max(a.norm(), 1e-3);
}

double rel_error(const Eigen::VectorXd& g, const Eigen::VectorXd& fd) {
  return (g - fd).norm() / std::max(fd.norm(), 1e-3);
}

Outcome gradient_suite() {
  const RobotHandModel& m = fixtures::allegro();
  const auto& cg = fixtures::cube_grasp();
  HumanGrasp h = fixtures::human_from_robot(m, cg.wrist, cg.q, cg.contacts);
  for (const char* tip : {"thumb_tip", "index_tip", "middle_tip"}) h.joints[m.human_map().at(tip)] *= 0.9;
  RetargetConfig cfg;
  cfg.table = TablePlane{-0.03};
  const RetargetObjective obj(m, h, cg.contacts, fixtures::cube(), RetargetWeights{}, cfg);
  const auto n = static_cast<Eigen::Index>(obj.parameter_count());

  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1, 1);
  const char* names[5] = {"pen", "fc", "pos", "joints", "col"};
  GradientCheck loss[5];
  auto term = [](const LossTerms& t, int k) {
    const double v[5] = {t.pen, t.fc, t.pos, t.joints, t.col};
    return v[k];
  };
  int accepted = 0, attempts = 0;
  while (accepted < 100 && attempts < 1000) {
    ++attempts;
    Pose6D wrist = cg.wrist;
    Eigen::VectorXd q = cg.q;
    Eigen::VectorXd delta(n);
    for (Eigen::Index i = 0; i < n; ++i) delta[i] = (i < 3 ? 0.05 : i < 6 ? 0.005 : 0.15) * u(rng);
    RetargetObjective::apply_increment(wrist, q, delta);

    auto fd = [&](double hstep) {
      std::vector<Eigen::VectorXd> g(5, Eigen::VectorXd(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[i] = hstep;
        Pose6D wp = wrist, wm = wrist;
        Eigen::VectorXd qp = q, qm = q;
        RetargetObjective::apply_increment(wp, qp, e);
        RetargetObjective::apply_increment(wm, qm, -e);
        const LossTerms tp = obj.evaluate(wp, qp), tm = obj.evaluate(wm, qm);
        for (int k = 0; k < 5; ++k) g[k][i] = (term(tp, k) - term(tm, k)) / (2 * hstep);
      }
      return g;
    };
    const auto coarse = fd(1e-6), fine = fd(1e-7);
    bool kink = false;
    for (int k = 0; k < 5; ++k) kink = kink || !smooth(coarse[k], fine[k]);
    if (kink) {
      for (int k = 0; k < 5; ++k)
        if (!smooth(coarse[k], fine[k])) ++loss[k].kinks;
      continue;
    }
    ++accepted;
    const auto a = obj.analytic_gradient(wrist, q);
    const Eigen::VectorXd* ga[5] = {&a.pen, &a.fc, &a.pos, &a.joints, &a.col};
    for (int k = 0; k < 5; ++k) loss[k].worst = std::max(loss[k].worst, rel_error(*ga[k], coarse[k]));
  }

  // signed distance
  const TriMeshObject sphere = make_icosphere(0.1, 3);
  double sdf_worst = 0.0;
  int sdf_checked = 0;
  for (const TriMeshObject* mesh : {&fixtures::cube(), &sphere}) {
    int checked = 0;
    while (checked < 100) {
      const Vec3 p = 0.12 * Vec3(u(rng), u(rng), u(rng));
      const SurfaceQuery sq = mesh->query(p);
      if (std::abs(sq.distance) < 1e-3) continue;
      auto grad = [&](double hstep) {
        Vec3 g;
        for (int i = 0; i < 3; ++i) {
          Vec3 e = Vec3::Zero();
          e[i] = hstep;
          g[i] = (mesh->signed_distance(p + e) - mesh->signed_distance(p - e)) / (2 * hstep);
        }
        return g;
      };
      const Vec3 c = grad(1e-6), f = grad(1e-7);
      if (!smooth(c, f)) continue;  // medial axis
      sdf_worst = std::max(sdf_worst, rel_error(sq.gradient, c));
      ++checked;
    }
    sdf_checked += checked;
  }

  // gravity torques against the potential
  double grav_worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const RobotHandModel& hm = trial % 2 == 0 ? fixtures::chain3() : fixtures::allegro();
    Eigen::VectorXd qq(hm.dof());
    for (Eigen::Index i = 0; i < qq.size(); ++i) qq[i] = 2.0 * u(rng);
    Pose6D w;
    w.rotation = random_rotation(rng);
    const Eigen::VectorXd tau = gravity_torques(hm, w, qq);
    Eigen::VectorXd fdg(qq.size());
    for (Eigen::Index i = 0; i < qq.size(); ++i) {
      Eigen::VectorXd qp = qq, qm = qq;
      qp[i] += 1e-6;
      qm[i] -= 1e-6;
      fdg[i] = (potential_energy(hm, w, qp) - potential_energy(hm, w, qm)) / 2e-6;
    }
    grav_worst = std::max(grav_worst, rel_error(tau, fdg));
  }

  bool pass = accepted == 100 && sdf_worst < 1e-4 && grav_worst < 1e-4;
  std::string detail = fmt::format("{} configs ({} kinked skipped):", accepted, attempts - accepted);
  for (int k = 0; k < 5; ++k) {
    pass = pass && loss[k].worst < 1e-4;
    detail += fmt::format(" {} {:.1e}", names[k], loss[k].worst);
  }
  detail += fmt::format("; sdf {:.1e} ({} pts); gravity {:.1e}", sdf_worst, sdf_checked, grav_worst);
  return {pass, detail};
}

Outcome sysid_recovery() {
  const RobotHandModel& m = fixtures::finger4();
  SimConfig sim;
  sim.joint_inertia = Eigen::VectorXd::Constant(m.dof(), 0.02);
  const double k = 2.0, d = 0.1;
  const auto cmds = multisine_commands(m, 10.0, 10.0, 41);
  const JointTrajectory clean = rollout(m, ActuatorParams::uniform(m.dof(), k, d), sim, cmds.front(), cmds);
  const JointTrajectory noisy = add_measurement_noise(clean, 1e-3, 42);

  CmaesConfig cm;
  cm.seed = 43;
  const auto t0 = Clock::now();
  const SysidResult a = identify(m, clean, cm, sim);
  const SysidResult b = identify(m, noisy, cm, sim);
  const double elapsed = seconds_since(t0);

  auto worst = [](const Eigen::VectorXd& v, double truth) {
    return ((v.array() - truth).abs() / truth).maxCoeff();
  };
  const double ka = worst(a.params.stiffness, k), da = worst(a.params.damping, d);
  const double kb = worst(b.params.stiffness, k);
  return {clean.size() == 100 && ka < 0.02 && da < 0.05 && kb < 0.05 && elapsed < 300.0,
          fmt::format("noiseless k {:.3f}% d {:.3f}%, noisy k {:.3f}%, {:.1f} s", 100 * ka, 100 * da, 100 * kb,
                      elapsed)};
}

Outcome gravity_compensation() {
  const RobotHandModel& m = fixtures::chain3();
  const Eigen::VectorXd hold = Eigen::VectorXd::Zero(m.dof());  // straight out along +x, horizontal
  const std::vector<Eigen::VectorXd> cmds(100, hold);
  const auto params = ActuatorParams::uniform(m.dof(), 2.0, 0.1);
  SimConfig on;
  SimConfig off;
  off.gravity_comp = false;
  const JointTrajectory with = rollout(m, params, on, hold, cmds);
  const JointTrajectory without = rollout(m, params, off, hold, cmds);
  const double e_on = (with.q_measured.back() - hold).cwiseAbs().maxCoeff();
  const double e_off = (without.q_measured.back() - hold).cwiseAbs().maxCoeff();
  const double settle = (without.q_measured.back() - without.q_measured[without.size() - 2]).cwiseAbs().maxCoeff();
  return {e_on < 1e-3 && e_off > 1e-2 && settle < 1e-4,
          fmt::format("steady-state error {:.2e} rad with compensation, {:.3f} rad without", e_on, e_off)};
}

Outcome cmaes_benchmarks() {
  int sphere_ok = 0, rosen_ok = 0, monotone_bad = 0;
  const int seeds = 10;
  double sphere_worst = 0.0, rosen_worst = 0.0;
  int sphere_gens = 0, rosen_gens = 0;
  auto monotone = [](const CmaesResult& r) {
    for (std::size_t i = 1; i < r.history.size(); ++i)
      if (r.history[i] > r.history[i - 1]) return false;
    return true;
  };
  for (int s = 0; s < seeds; ++s) {
    CmaesConfig c;
    c.seed = static_cast<std::uint64_t>(s);
    c.max_gens = 200;
    const auto sp = cmaes_minimize([](const Eigen::VectorXd& x) { return x.squaredNorm(); }, c, Eigen::Vector4d::Ones());
    sphere_worst = std::max(sphere_worst, sp.loss_best);
    sphere_gens = std::max(sphere_gens, sp.generations);
    sphere_ok += sp.loss_best < 1e-10 && sp.generations <= 200;
    monotone_bad += !monotone(sp);

    c.max_gens = 500;
    const auto rb = cmaes_minimize(
        [](const Eigen::VectorXd& x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); }, c,
        Eigen::Vector2d(-1.2, 1.0));
    rosen_worst = std::max(rosen_worst, rb.loss_best);
    rosen_gens = std::max(rosen_gens, rb.generations);
    rosen_ok += rb.loss_best < 1e-6 && rb.generations <= 500;
    monotone_bad += !monotone(rb);
  }
  return {sphere_ok == seeds && rosen_ok == seeds && monotone_bad == 0,
          fmt::format("{} seeds: sphere worst {:.1e} ({} gens), rosenbrock worst {:.1e} ({} gens), non-monotone runs {}",
                      seeds, sphere_worst, sphere_gens, rosen_worst, rosen_gens, monotone_bad)};
}

JointTrajectory heights(const std::vector<double>& z, double hz) {
  JointTrajectory t;
  for (std::size_t k = 0; k < z.size(); ++k) {
    t.push_back(static_cast<double>(k) / hz, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    Pose6D p;
    p.position = Vec3(0.3, 0.0, z[k]);
    t.object_poses.push_back(p);
  }
  return t;
}

Outcome metrics_conformance() {
  const double z0 = 0.025;
  auto profile = [&](double lift, double lift_at, double drop_at, double end) {
    std::vector<double> z;
    for (double t = 0.0; t <= end + 1e-9; t += 0.1) z.push_back(t >= lift_at && t < drop_at ? z0 + lift : z0);
    return heights(z, 10.0);
  };
  const bool held = metric_success(profile(0.12, 1.0, 1e9, 5.0));
  const bool low = !metric_success(profile(0.05, 1.0, 1e9, 5.0));
  const bool dropped = !metric_success(profile(0.15, 1.0, 3.0, 5.0));
  const bool at_threshold = !metric_success(profile(0.1, 1.0, 1e9, 5.0));  // must exceed 0.1 m
  const bool short_hold = !metric_success(profile(0.12, 2.2, 1e9, 5.0));   // 2.8 s above
  const bool rule = held && low && dropped && at_threshold && short_hold;

  std::mt19937_64 rng(707);
  std::normal_distribution<double> n(0.0, 2e-3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double simd_err = 0.0, ratio_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    JointTrajectory t;
    Vec3 p(0.3, 0.0, 0.1);
    double time = 0.0;
    const std::size_t c = 4;
    RobotGrasp ref;
    ref.link_contacts.resize(c);
    for (std::size_t i = 0; i < c; ++i) ref.link_contacts[i] = u(rng) < 0.6;
    ref.link_contacts[trial % c] = true;
    for (int k = 0; k < 80; ++k) {
      time += 0.05 + 0.1 * u(rng);
      p += Vec3(n(rng), n(rng), n(rng));
      t.push_back(time, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
      Pose6D pose;
      pose.position = p;
      t.object_poses.push_back(pose);
      std::vector<bool> flags(c);
      for (std::size_t i = 0; i < c; ++i) flags[i] = u(rng) < 0.7;
      t.contact_flags.push_back(flags);
    }
    const double start = t.times[20] - 1e-9;
    double sum = 0.0;
    int steps = 0;
    double rsum = 0.0;
    int records = 0;
    int targets = 0;
    for (bool b : ref.link_contacts) targets += b;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t.times[k] < start) continue;
      if (k + 1 < t.size()) {
        sum += (t.object_poses[k + 1].position - t.object_poses[k].position).norm() / (t.times[k + 1] - t.times[k]);
        ++steps;
      }
      int hit = 0;
      for (std::size_t i = 0; i < c; ++i) hit += ref.link_contacts[i] && t.contact_flags[k][i];
      rsum += static_cast<double>(hit) / targets;
      ++records;
    }
    simd_err = std::max(simd_err, std::abs(metric_simd(t, start) - 1000.0 * sum / steps));
    ratio_err = std::max(ratio_err, std::abs(metric_contact_ratio(t, ref, start) - rsum / records));
  }
  return {rule && simd_err < 1e-9 && ratio_err < 1e-9,
          fmt::format("lift/hold rule {}, simd max error {:.1e} mm/s, contact ratio max error {:.1e}",
                      rule ? "ok" : "violated", simd_err, ratio_err)};
}

SimState target_state(const Pose6D& object) {
  const RobotHandModel& m = fixtures::allegro();
  const auto& cg = fixtures::cube_grasp();
  SimState s;
  s.reference = RobotGrasp{cg.wrist, cg.q, cg.contacts, "cube_5cm"};
  s.object = object;
  s.object_initial_position = object.position;
  s.wrist = object * cg.wrist;
  s.q = cg.q;
  s.contacts = cg.contacts;
  s.forces = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.contact_links().size()));
  return s;
}

Outcome reward_identities() {
  const RobotHandModel& m = fixtures::allegro();
  std::mt19937_64 rng(808);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const auto& cg = fixtures::cube_grasp();
  const auto dirs = link_directions(m, cg.wrist, cg.q);
  auto flipped = dirs;
  for (auto& f : flipped)
    for (auto& v : f) v = -v;
  const double aligned = reward_pose(dirs, dirs);
  const double anti = reward_pose(dirs, flipped);

  double rq_min = 0.0, rq_max = -2.0, omega_err = 0.0, sum_err = 0.0;
  const RewardWeights w{1.3, 0.2, 0.7, 10.0};
  for (int trial = 0; trial < 100; ++trial) {
    Pose6D object;
    object.position = Vec3(u(rng), u(rng), 0.025);
    object.rotation = random_rotation(rng);
    const SimState at = target_state(object);
    omega_err = std::max(omega_err, std::abs(contact_weight(m, at) - 1.0));

    SimState s = at;
    s.wrist.position += 0.05 * Vec3(n(rng), n(rng), n(rng));
    s.wrist.rotation = (random_rotation(rng).slerp(0.8, s.wrist.rotation)).normalized();
    s.q = random_q(m, rng);
    for (std::size_t i = 0; i < s.contacts.size(); ++i) s.contacts[i] = u(rng) < 0.5;
    const double rq = reward_pose(m, s);
    rq_min = std::min(rq_min, rq);
    rq_max = std::max(rq_max, rq);
    const std::vector<double> f{u(rng), -u(rng)};
    const double parts = w.w_p * reward_position(m, s, w.beta_p) + contact_weight(m, s) * reward_contact(s) +
                         w.w_s * reward_safety(f) + w.w_q * reward_pose(m, s);
    sum_err = std::max(sum_err, std::abs(total_reward(w, m, s, f) - parts));
  }
  const bool range = rq_min >= -2.0 && rq_max <= 0.0;
  return {std::abs(aligned) < 1e-12 && std::abs(anti + 2.0) < 1e-12 && range && omega_err < 1e-12 && sum_err < 1e-12,
          fmt::format("r_q aligned {:.1e}, anti-aligned {:.12f}, random in [{:.3f}, {:.3f}]; omega_c at target off "
                      "by {:.1e}; total vs parts {:.1e}",
                      aligned, anti, rq_min, rq_max, omega_err, sum_err)};
}

Outcome cli_determinism() {
  const std::string cli = FUNGRASP_CLI_PATH;
  const std::string hands = fixtures::data_path("hands").string();
  fixtures::TempDir tmp("acceptance");

  // inputs shared by both runs
  {
    JointTrajectory t;
    const auto& cg = fixtures::cube_grasp();
    for (int k = 0; k < 50; ++k) {
      t.push_back(k * 0.1, cg.q, cg.q);
      Pose6D obj;
      obj.position = Vec3(0.4, 0.0, 0.025 + (k > 10 ? 0.13 : 0.0) + 1e-4 * std::sin(k));
      t.object_poses.push_back(obj);
      t.contact_flags.push_back({k % 3 != 0, true, false, true});
      t.wrist_poses.push_back(obj * cg.wrist);
    }
    fixtures::write_file(tmp / "eval.jsonl", serialize_trajectory_jsonl(t));
    fixtures::write_file(tmp / "ref.json",
                         serialize_robot_grasp(RobotGrasp{cg.wrist, cg.q, cg.contacts, "cube_5cm"}, fixtures::allegro()));
    RandomizationConfig rc;
    rc.damping = {Eigen::Vector4d(0.1, 0.1, 0.2, 0.2), 0.2};
    rc.kp = {Eigen::Vector4d(2, 2, 3, 3), 0.1};
    rc.kd = {Eigen::Vector4d(0.05, 0.05, 0.05, 0.05), 0.3};
    rc.friction = {0.5, 1.2};
    rc.object_mass = {0.1, 0.5};
    rc.table_height = {-0.02, 0.02};
    rc.observation_noise = {0.0, 0.01};
    fixtures::write_file(tmp / "rand.json", serialize_randomization_config(rc));
  }
  auto init = fixtures::run_process(cli, {"--seed", "5", "simulate", "--robot", hands + "/finger4.json", "--stiffness",
                                          "2", "--damping", "0.1", "--inertia", "0.02", "--multisine", "5", "-o",
                                          tmp / "real.jsonl"});
  if (init.code != 0) return {false, "could not create the sysid input: " + init.err};

  struct Command {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> outputs;  // file names under the run directory
  };
  const std::string obj = fixtures::data_path("objects/cube_5cm.obj").string();
  const std::string human = fixtures::data_path("grasps/cube_human.json").string();
  const std::vector<Command> commands{
      {"retarget",
       {"retarget", "--human", human, "--robot", hands + "/allegro_like.json", "--object", obj, "--max-iters", "300",
        "-o", "@grasp.json", "--loss-csv", "@loss.csv"},
       {"grasp.json", "loss.csv"}},
      {"sysid",
       {"--threads", "3", "sysid", "--robot", hands + "/finger4.json", "--traj", tmp / "real.jsonl", "--inertia", "0.02",
        "--max-gens", "25", "-o", "@params.json", "--gen-csv", "@gens.csv"},
       {"params.json", "gens.csv"}},
      {"simulate",
       {"simulate", "--robot", hands + "/allegro_like.json", "--stiffness", "3", "--damping", "0.2", "--multisine", "4",
        "--noise", "0.002", "-o", "@sim.jsonl"},
       {"sim.jsonl"}},
      {"gravcomp",
       {"gravcomp", "--robot", hands + "/allegro_like.json", "--q", "0.1", "0.2", "0.3", "0.4", "0.1", "0.2", "0.3",
        "0.4", "0.1", "0.2", "0.3", "0.4", "0.5", "0.2", "0.3", "0.4", "--wrist-rpy", "0.3", "-0.2", "1.0"},
       {}},
      {"eval",
       {"eval", "--traj", tmp / "eval.jsonl", "--reference", tmp / "ref.json", "--robot", hands + "/allegro_like.json",
        "--window-start", "1.5", "-o", "@report.json"},
       {"report.json"}},
      {"randomize", {"randomize", "--config", tmp / "rand.json", "-o", "@sample.json"}, {"sample.json"}},
  };

  std::vector<std::string> differing, failing;
  for (const auto& c : commands) {
    std::string first[8];
    bool ok = true;
    for (int run = 0; run < 2; ++run) {
      const std::string dir = tmp / (c.name + std::to_string(run));
      std::filesystem::create_directories(dir);
      std::vector<std::string> args{"--seed", "1234", "-q"};
      for (const auto& a : c.args) args.push_back(a.starts_with("@") ? dir + "/" + a.substr(1) : a);
      const auto r = fixtures::run_process(cli, args);
      if (r.code != 0) {
        ok = false;
        break;
      }
      std::vector<std::string> blobs{r.out};
      for (const auto& o : c.outputs) blobs.push_back(fixtures::read_file(dir + "/" + o));
      for (std::size_t i = 0; i < blobs.size(); ++i) {
        if (run == 0)
          first[i] = blobs[i];
        else if (first[i] != blobs[i])
          ok = false;
      }
      if (run == 0 && blobs.size() == 1 && blobs[0].empty()) ok = false;
    }
    if (!ok) differing.push_back(c.name);
  }
  std::string detail = fmt::format("{} subcommands run twice", commands.size());
  if (!differing.empty()) {
    detail += "; differing or failed:";
    for (const auto& n : differing) detail += " " + n;
  } else {
    detail += ", outputs byte-identical";
  }
  return {differing.empty(), detail};
}

}  // namespace

int main() {
  logger().set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 self-retarget", self_retarget},
      {"2 cube retarget", geometric_retarget},
      {"3 gradients", gradient_suite},
      {"4 sysid recovery", sysid_recovery},
      {"5 gravity compensation", gravity_compensation},
      {"6 cma-es benchmarks", cmaes_benchmarks},
      {"7 metrics", metrics_conformance},
      {"8 reward identities", reward_identities},
      {"9 cli determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
