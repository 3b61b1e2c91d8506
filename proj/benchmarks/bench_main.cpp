#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "fungrasp/cmaes.hpp"
#include "fungrasp/dynamics.hpp"
#include "fungrasp/grasp.hpp"
#include "fungrasp/kinematics.hpp"
#include "fungrasp/log.hpp"
#include "fungrasp/mesh.hpp"
#include "fungrasp/retarget.hpp"
#include "fungrasp/sysid.hpp"

using namespace fungrasp;

namespace {

std::filesystem::path data(const char* rel) { return std::filesystem::path(FUNGRASP_BENCH_DATA_DIR) / rel; }

const RobotHandModel& allegro() {
  static const RobotHandModel m = load_robot_description(data("hands/allegro_like.json"));
  return m;
}

const RobotHandModel& finger4() {
  static const RobotHandModel m = load_robot_description(data("hands/finger4.json"));
  return m;
}

std::vector<Vec3> random_points(std::size_t n, double extent) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  return pts;
}

void BM_SignedDistance(benchmark::State& state) {
  const TriMeshObject sphere = make_icosphere(0.1, static_cast<int>(state.range(0)));
  const auto pts = random_points(1024, 0.15);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sphere.signed_distance(pts[i++ & 1023]));
  state.counters["triangles"] = static_cast<double>(sphere.triangles().size());
}
BENCHMARK(BM_SignedDistance)->Arg(2)->Arg(3)->Arg(5);

void BM_ForwardKinematics(benchmark::State& state) {
  const RobotHandModel& m = allegro();
  const Eigen::VectorXd q = 0.5 * (m.lower_limits() + m.upper_limits());
  const Eigen::Isometry3d wrist = Eigen::Isometry3d::Identity();
  for (auto _ : state) benchmark::DoNotOptimize(compute_link_frames(m, wrist, q));
}
BENCHMARK(BM_ForwardKinematics);

struct RetargetSetup {
  HumanGrasp human;
  TriMeshObject cube = load_obj(data("objects/cube_5cm.obj"));
  RobotGrasp init;
  RetargetSetup() : human(load_human_grasp(data("grasps/cube_human.json"))), init(initialize_grasp(allegro(), human)) {}
};

const RetargetSetup& retarget_setup() {
  static const RetargetSetup s;
  return s;
}

void BM_RetargetLoss(benchmark::State& state) {
  const auto& s = retarget_setup();
  const RetargetObjective obj(allegro(), s.human, s.init.link_contacts, s.cube, RetargetWeights{}, RetargetConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(s.init.wrist_pose, s.init.joint_angles));
}
BENCHMARK(BM_RetargetLoss);

void BM_RetargetGradient(benchmark::State& state) {
  const auto& s = retarget_setup();
  const RetargetObjective obj(allegro(), s.human, s.init.link_contacts, s.cube, RetargetWeights{}, RetargetConfig{});
  const bool analytic = state.range(0) != 0;
  for (auto _ : state) {
    if (analytic)
      benchmark::DoNotOptimize(obj.analytic_gradient(s.init.wrist_pose, s.init.joint_angles));
    else
      benchmark::DoNotOptimize(obj.finite_difference_gradient(s.init.wrist_pose, s.init.joint_angles, 1e-6));
  }
  state.SetLabel(analytic ? "analytic" : "central differences");
}
BENCHMARK(BM_RetargetGradient)->Arg(0)->Arg(1);

void BM_Rollout(benchmark::State& state) {
  const RobotHandModel& m = allegro();
  const auto cmds = multisine_commands(m, 10.0, 10.0, 1);
  const auto params = ActuatorParams::uniform(m.dof(), 2.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(rollout(m, params, SimConfig{}, cmds.front(), cmds));
  state.SetLabel("16 joints, 10 s at dt 1 ms");
}
BENCHMARK(BM_Rollout)->Unit(benchmark::kMillisecond);

void BM_CmaesSphere(benchmark::State& state) {
  CmaesConfig c;
  c.max_gens = 200;
  const auto n = static_cast<Eigen::Index>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        cmaes_minimize([](const Eigen::VectorXd& x) { return x.squaredNorm(); }, c, Eigen::VectorXd::Ones(n)));
}
BENCHMARK(BM_CmaesSphere)->Arg(4)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Identify(benchmark::State& state) {
  const RobotHandModel& m = finger4();
  SimConfig sim;
  sim.joint_inertia = Eigen::VectorXd::Constant(m.dof(), 0.02);
  const auto cmds = multisine_commands(m, 10.0, 10.0, 2);
  const auto real = rollout(m, ActuatorParams::uniform(m.dof(), 2.0, 0.1), sim, cmds.front(), cmds);
  CmaesConfig c;
  c.max_gens = 20;
  for (auto _ : state) benchmark::DoNotOptimize(identify(m, real, c, sim));
  state.SetLabel("20 generations");
}
BENCHMARK(BM_Identify)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  logger().set_level(spdlog::level::err);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
