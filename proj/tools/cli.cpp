#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fungrasp/contacts.hpp"
#include "fungrasp/dynamics.hpp"
#include "fungrasp/error.hpp"
#include "fungrasp/log.hpp"
#include "fungrasp/metrics.hpp"
#include "fungrasp/parallel.hpp"
#include "fungrasp/randomization.hpp"
#include "fungrasp/retarget.hpp"
#include "fungrasp/rewards.hpp"
#include "fungrasp/sysid.hpp"

namespace fungrasp::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

// stdout when the path is empty or "-"
void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    std::cout.flush();
  } else {
    write_file(path, contents);
  }
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec3 to_vec3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

// --- options ------------------------------------------------------------------

struct RetargetOpts {
  std::string human, robot, object, out, loss_csv;
  RetargetWeights weights;
  RetargetConfig config;
  std::string gradient = "fd";
  std::optional<double> table_height;
};

struct SimOpts {
  double dt = SimConfig{}.dt;
  double control_hz = SimConfig{}.control_hz;
  double inertia = kDefaultJointInertia;
  std::vector<double> gravity{kDefaultGravity.x(), kDefaultGravity.y(), kDefaultGravity.z()};
  bool no_gravity_comp = false;

  SimConfig config(const RobotHandModel& model) const {
    SimConfig c;
    c.dt = dt;
    c.control_hz = control_hz;
    c.gravity = to_vec3(gravity);
    c.gravity_comp = !no_gravity_comp;
    c.joint_inertia = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(model.dof()), inertia);
    c.validate(model.dof());
    return c;
  }
};

void add_sim_options(CLI::App* app, SimOpts& o) {
  app->add_option("--dt", o.dt, "integration step (s)")->capture_default_str();
  app->add_option("--control-hz", o.control_hz, "command hold rate (Hz)")->capture_default_str();
  app->add_option("--inertia", o.inertia, "lumped joint inertia (kg m^2)")->capture_default_str();
  app->add_option("--gravity", o.gravity, "gravity vector (m/s^2)")->expected(3)->capture_default_str();
  app->add_flag("--no-gravity-comp", o.no_gravity_comp, "disable gravity compensation");
}

struct SysidOpts {
  std::string robot, traj, out, gen_csv;
  std::string mode = "per-joint";
  CmaesConfig cmaes;
  SysidSearchSpace space;
  SimOpts sim;
};

struct SimulateOpts {
  std::string robot, params, commands, out;
  std::optional<double> stiffness, damping;
  std::optional<double> multisine;
  std::vector<double> q0;
  double noise = 0.0;
  SimOpts sim;
};

struct GravcompOpts {
  std::string robot;
  std::vector<double> q;
  std::vector<double> wrist_xyz{0.0, 0.0, 0.0};
  std::vector<double> wrist_rpy{0.0, 0.0, 0.0};
  std::vector<double> gravity{kDefaultGravity.x(), kDefaultGravity.y(), kDefaultGravity.z()};
};

struct EvalOpts {
  std::string traj, reference, robot, out;
  double lift = kLiftHeight;
  double hold = kHoldSeconds;
  double window_start = 0.0;
  double table_height = 0.0;
  RewardWeights weights;
};

struct RandomizeOpts {
  std::string config, out;
};

// --- defaults table -----------------------------------------------------------

std::string defaults_table() {
  const RetargetWeights w;
  const RetargetConfig rc;
  const SimConfig sc;
  const CmaesConfig cc;
  const SysidSearchSpace ss;
  const RewardWeights rw;
  std::string s;
  auto row = [&](const char* name, auto value, const char* note) {
    s += fmt::format("{:<28} {:<12} {}\n", name, value, note);
  };
  s += "retarget\n";
  row("  --w-pen", w.pen, "penetration weight");
  row("  --w-fc", w.fc, "force-closure weight");
  row("  --w-pos", w.pos, "contact-position weight");
  row("  --w-joints", w.joints, "joint-limit weight");
  row("  --w-col", w.col, "collision weight");
  row("  --tau-col", w.tau_col, "joint clearance (m)");
  row("  --lr", rc.learning_rate, "Adam step");
  row("  --max-iters", rc.max_iters, "iteration cap");
  row("  --tol", rc.tol, "stop when the loss drops less than this");
  row("  --fd-step", rc.fd_step, "central-difference step");
  row("  --gradient", "fd", "fd | analytic");
  row("  --contact-threshold", kDefaultContactThreshold, "contact distance (m)");
  s += "dynamics\n";
  row("  --dt", sc.dt, "integration step (s)");
  row("  --control-hz", sc.control_hz, "command rate (Hz)");
  row("  --inertia", kDefaultJointInertia, "joint inertia (kg m^2)");
  row("  --gravity", "0 0 -9.81", "m/s^2");
  row("  gravity compensation", "on", "--no-gravity-comp disables");
  row("  initial finger scale", kInitialFingerScale, "q_init = scale * q_ref");
  row("  initial wrist distance", kInitialWristDistance, "m from the object center");
  s += "sysid\n";
  row("  --population", "4+3ln(n)", "CMA-ES lambda");
  row("  --sigma0", cc.sigma0, "fraction of the log range");
  row("  --max-gens", cc.max_gens, "generations");
  row("  --k-min", ss.stiffness_lower, "stiffness search floor");
  row("  --k-max", ss.stiffness_upper, "stiffness search ceiling");
  row("  --d-min", ss.damping_lower, "damping search floor");
  row("  --d-max", ss.damping_upper, "damping search ceiling");
  row("  --mode", "per-joint", "per-joint | tied");
  row("  multi-sine band", "0.2-2 Hz", "simulate --multisine");
  s += "eval\n";
  row("  --lift", kLiftHeight, "success lift height (m)");
  row("  --hold", kHoldSeconds, "success hold time (s)");
  row("  --beta-p", rw.beta_p, "position kernel (1/m)");
  row("  --w-p", rw.w_p, "position reward weight");
  row("  --w-s", rw.w_s, "safety reward weight");
  row("  --w-q", rw.w_q, "pose reward weight");
  s += "general\n";
  row("  --seed", 0, "random seed");
  row("  --threads", "auto", "worker cap (FUNGRASP_THREADS)");
  return s;
}

// --- subcommands --------------------------------------------------------------

int cmd_retarget(const RetargetOpts& o) {
  const RobotHandModel model = load_robot_description(o.robot);
  const HumanGrasp human = load_human_grasp(o.human);
  const TriMeshObject mesh = load_obj(o.object);
  RetargetConfig config = o.config;
  if (o.gradient == "analytic")
    config.gradient = GradientMode::Analytic;
  else if (o.gradient != "fd")
    throw ValidationError("--gradient must be fd or analytic");
  if (o.table_height) config.table = TablePlane{*o.table_height};
  for (auto [name, value] : {std::pair{"pen", o.weights.pen}, {"fc", o.weights.fc}, {"pos", o.weights.pos},
                             {"joints", o.weights.joints}, {"col", o.weights.col}})
    if (value == 0.0) logger().warn("weight w-{} is zero; that loss term is disabled", name);

  const RetargetResult result = optimize_grasp(model, human, mesh, o.weights, config);
  emit(o.out, serialize_robot_grasp(result.grasp, model));
  if (!o.loss_csv.empty()) write_file(o.loss_csv, loss_history_csv(result.loss_history));
  const auto& last = result.loss_history.back();
  logger().info("retarget: {} iterations, loss {:.6g} (pen {:.3g}, fc {:.3g}, pos {:.3g}, joints {:.3g}, col {:.3g})",
                result.iterations, last.total, last.terms.pen, last.terms.fc, last.terms.pos, last.terms.joints,
                last.terms.col);
  if (!result.converged) {
    logger().warn("retarget did not converge within {} iterations", config.max_iters);
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_sysid(SysidOpts o, std::uint64_t seed) {
  const RobotHandModel model = load_robot_description(o.robot);
  const JointTrajectory real = load_trajectory(o.traj);
  SysidOptions options;
  if (o.mode == "tied")
    options.mode = SysidMode::Tied;
  else if (o.mode != "per-joint")
    throw ValidationError("--mode must be per-joint or tied");
  options.space = o.space;
  o.cmaes.seed = seed;
  const SysidResult result = identify(model, real, o.cmaes, o.sim.config(model), options);
  emit(o.out, serialize_actuator_params(result.params));
  if (!o.gen_csv.empty()) write_file(o.gen_csv, generation_csv(result));
  const std::string summary = fmt::format("best_loss {:.17g}\n", result.best_loss);
  if (o.out.empty() || o.out == "-")
    std::cerr << summary;
  else
    std::cout << summary;
  return std::isfinite(result.best_loss) ? kExitOk : kExitNotConverged;
}

int cmd_simulate(const SimulateOpts& o, std::uint64_t seed) {
  const RobotHandModel model = load_robot_description(o.robot);
  const SimConfig config = o.sim.config(model);
  ActuatorParams params;
  if (!o.params.empty()) {
    params = parse_actuator_params(read_file(o.params));
  } else if (o.stiffness && o.damping) {
    params = ActuatorParams::uniform(model.dof(), *o.stiffness, *o.damping);
  } else {
    throw ValidationError("give --params or both --stiffness and --damping");
  }
  params.validate(model.dof());

  std::vector<Eigen::VectorXd> commands;
  if (!o.commands.empty() && o.multisine) throw ValidationError("--commands and --multisine are exclusive");
  if (!o.commands.empty()) {
    commands = load_trajectory(o.commands).q_commanded;
  } else if (o.multisine) {
    commands = multisine_commands(model, *o.multisine, config.control_hz, seed);
  } else {
    throw ValidationError("give --commands or --multisine");
  }
  if (commands.empty()) throw ValidationError("no commands");
  for (const auto& c : commands)
    if (static_cast<std::size_t>(c.size()) != model.dof()) throw ValidationError("command width does not match the model");

  Eigen::VectorXd q0 = o.q0.empty() ? commands.front() : to_vector(o.q0);
  if (static_cast<std::size_t>(q0.size()) != model.dof()) throw ValidationError("--q0 needs one value per joint");
  JointTrajectory traj = rollout(model, params, config, q0, commands);
  traj = add_measurement_noise(std::move(traj), o.noise, seed + 1);
  emit(o.out, serialize_trajectory_jsonl(traj));
  return kExitOk;
}

int cmd_gravcomp(const GravcompOpts& o) {
  const RobotHandModel model = load_robot_description(o.robot);
  Eigen::VectorXd q = o.q.empty() ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof())) : to_vector(o.q);
  if (static_cast<std::size_t>(q.size()) != model.dof())
    throw ValidationError(fmt::format("--q needs {} values, got {}", model.dof(), q.size()));
  Pose6D wrist;
  wrist.position = to_vec3(o.wrist_xyz);
  wrist.rotation = Eigen::Quaterniond(rpy_to_matrix(to_vec3(o.wrist_rpy))).normalized();
  const Eigen::VectorXd tau = gravity_torques(model, wrist, q, to_vec3(o.gravity));
  for (std::size_t j = 0; j < model.dof(); ++j)
    std::cout << fmt::format("{} {:.6g}\n", model.link(model.link_of_joint(j)).name,
                             tau[static_cast<Eigen::Index>(j)] + 0.0);
  return kExitOk;
}

int cmd_eval(const EvalOpts& o) {
  const JointTrajectory traj = load_trajectory(o.traj);
  json report;
  report["success"] = metric_success(traj, o.lift, o.hold);
  report["simd_mm_s"] = metric_simd(traj, o.window_start);
  report["contact_ratio"] = nullptr;
  report["rewards"] = json::object();

  if (!o.reference.empty()) {
    if (o.robot.empty()) throw ValidationError("--reference needs --robot");
    const RobotHandModel model = load_robot_description(o.robot);
    const RobotGrasp reference = load_robot_grasp(o.reference, model);
    if (traj.has_contacts()) report["contact_ratio"] = metric_contact_ratio(traj, reference, o.window_start);
    if (traj.has_wrist_poses()) {
      SimState s;
      const std::size_t last = traj.size() - 1;
      s.q = traj.q_measured[last];
      s.wrist = traj.wrist_poses[last];
      s.object = traj.object_poses[last];
      s.object_initial_position = traj.object_poses.front().position;
      s.contacts = traj.has_contacts() ? traj.contact_flags[last]
                                       : std::vector<bool>(model.contact_links().size(), false);
      s.forces = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.contact_links().size()));
      s.reference = reference;
      const RewardTerms t = reward_terms(o.weights, model, s, {});
      report["rewards"] = {{"r_p", t.r_p}, {"r_c", t.r_c},         {"r_s", t.r_s},
                           {"r_q", t.r_q}, {"omega_c", t.omega_c}, {"total", t.total}};
    } else {
      logger().info("trajectory has no wrist poses; rewards skipped");
    }
  }
  emit(o.out, report.dump(2) + "\n");
  return kExitOk;
}

int cmd_randomize(const RandomizeOpts& o, std::uint64_t seed) {
  const RandomizationConfig config = load_randomization_config(o.config);
  emit(o.out, serialize_randomization_sample(sample_randomization(config, seed)));
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"fungrasp: functional grasp retargeting, actuator identification and evaluation"};
  app.require_subcommand(0, 1);

  std::uint64_t seed = 0;
  unsigned threads = 0;
  int verbosity = 0;
  bool quiet = false;
  bool show_defaults = false;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0: FUNGRASP_THREADS or all cores)");
  app.add_flag("-v,--verbose", verbosity, "more logging (repeatable)");
  app.add_flag("-q,--quiet", quiet, "errors only");
  app.add_flag("--show-defaults", show_defaults, "print the numeric defaults and exit");

  RetargetOpts rt;
  auto* retarget = app.add_subcommand("retarget", "retarget a human grasp to a robot hand");
  retarget->add_option("--human", rt.human, "human grasp JSON")->required()->check(CLI::ExistingFile);
  retarget->add_option("--robot", rt.robot, "robot description JSON")->required()->check(CLI::ExistingFile);
  retarget->add_option("--object", rt.object, "object mesh (OBJ)")->required()->check(CLI::ExistingFile);
  retarget->add_option("-o,--out", rt.out, "robot grasp JSON (default stdout)");
  retarget->add_option("--loss-csv", rt.loss_csv, "per-iteration loss history");
  retarget->add_option("--w-pen", rt.weights.pen)->capture_default_str();
  retarget->add_option("--w-fc", rt.weights.fc)->capture_default_str();
  retarget->add_option("--w-pos", rt.weights.pos)->capture_default_str();
  retarget->add_option("--w-joints", rt.weights.joints)->capture_default_str();
  retarget->add_option("--w-col", rt.weights.col)->capture_default_str();
  retarget->add_option("--tau-col", rt.weights.tau_col)->capture_default_str();
  retarget->add_option("--lr", rt.config.learning_rate)->capture_default_str();
  retarget->add_option("--max-iters", rt.config.max_iters)->capture_default_str();
  retarget->add_option("--tol", rt.config.tol)->capture_default_str();
  retarget->add_option("--fd-step", rt.config.fd_step)->capture_default_str();
  retarget->add_option("--gradient", rt.gradient, "fd | analytic")->capture_default_str();
  retarget->add_option("--table-height", rt.table_height, "world table height for the collision term (m)");

  SysidOpts si;
  auto* sysid = app.add_subcommand("sysid", "identify joint stiffness and damping with CMA-ES");
  sysid->add_option("--robot", si.robot)->required()->check(CLI::ExistingFile);
  sysid->add_option("--traj", si.traj, "recorded trajectory (JSON lines)")->required()->check(CLI::ExistingFile);
  sysid->add_option("-o,--out", si.out, "params JSON (default stdout)");
  sysid->add_option("--gen-csv", si.gen_csv, "per-generation best loss");
  sysid->add_option("--mode", si.mode, "per-joint | tied")->capture_default_str();
  sysid->add_option("--population", si.cmaes.population, "CMA-ES lambda (0: default)");
  sysid->add_option("--sigma0", si.cmaes.sigma0)->capture_default_str();
  sysid->add_option("--max-gens", si.cmaes.max_gens)->capture_default_str();
  sysid->add_option("--k-min", si.space.stiffness_lower)->capture_default_str();
  sysid->add_option("--k-max", si.space.stiffness_upper)->capture_default_str();
  sysid->add_option("--d-min", si.space.damping_lower)->capture_default_str();
  sysid->add_option("--d-max", si.space.damping_upper)->capture_default_str();
  add_sim_options(sysid, si.sim);

  SimulateOpts sm;
  auto* simulate = app.add_subcommand("simulate", "roll out joint commands through the actuator model");
  simulate->add_option("--robot", sm.robot)->required()->check(CLI::ExistingFile);
  simulate->add_option("--params", sm.params, "params JSON")->check(CLI::ExistingFile);
  simulate->add_option("--stiffness", sm.stiffness, "uniform stiffness");
  simulate->add_option("--damping", sm.damping, "uniform damping");
  simulate->add_option("--commands", sm.commands, "trajectory whose q_cmd is replayed")->check(CLI::ExistingFile);
  simulate->add_option("--multisine", sm.multisine, "generate multi-sine commands of this duration (s)");
  simulate->add_option("--q0", sm.q0, "initial joint angles (default: first command)");
  simulate->add_option("--noise", sm.noise, "measurement noise sigma (rad)")->capture_default_str();
  simulate->add_option("-o,--out", sm.out, "trajectory JSON lines (default stdout)");
  add_sim_options(simulate, sm.sim);

  GravcompOpts gc;
  auto* gravcomp = app.add_subcommand("gravcomp", "print gravity-compensation torques");
  gravcomp->add_option("--robot", gc.robot)->required()->check(CLI::ExistingFile);
  gravcomp->add_option("--q", gc.q, "joint angles (default zeros)");
  gravcomp->add_option("--wrist-xyz", gc.wrist_xyz)->expected(3);
  gravcomp->add_option("--wrist-rpy", gc.wrist_rpy)->expected(3);
  gravcomp->add_option("--gravity", gc.gravity)->expected(3)->capture_default_str();

  EvalOpts ev;
  auto* eval = app.add_subcommand("eval", "success, SimD, contact ratio and rewards of a trajectory");
  eval->add_option("--traj", ev.traj)->required()->check(CLI::ExistingFile);
  eval->add_option("--reference", ev.reference, "robot grasp JSON")->check(CLI::ExistingFile);
  eval->add_option("--robot", ev.robot, "robot description JSON")->check(CLI::ExistingFile);
  eval->add_option("-o,--out", ev.out, "report JSON (default stdout)");
  eval->add_option("--lift", ev.lift)->capture_default_str();
  eval->add_option("--hold", ev.hold)->capture_default_str();
  eval->add_option("--window-start", ev.window_start, "metrics use records from this time on")->capture_default_str();
  eval->add_option("--beta-p", ev.weights.beta_p)->capture_default_str();
  eval->add_option("--w-p", ev.weights.w_p)->capture_default_str();
  eval->add_option("--w-s", ev.weights.w_s)->capture_default_str();
  eval->add_option("--w-q", ev.weights.w_q)->capture_default_str();

  RandomizeOpts rz;
  auto* randomize = app.add_subcommand("randomize", "sample domain-randomization parameters");
  randomize->add_option("--config", rz.config, "randomization ranges JSON")->required()->check(CLI::ExistingFile);
  randomize->add_option("-o,--out", rz.out, "sample JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  spdlog::level::level_enum level = spdlog::level::warn;
  if (quiet) level = spdlog::level::err;
  else if (verbosity == 1) level = spdlog::level::info;
  else if (verbosity >= 2) level = spdlog::level::debug;
  logger().set_level(level);
  set_thread_count(threads);

  if (show_defaults) {
    std::cout << defaults_table();
    return kExitOk;
  }

  try {
    if (*retarget) return cmd_retarget(rt);
    if (*sysid) return cmd_sysid(si, seed);
    if (*simulate) return cmd_simulate(sm, seed);
    if (*gravcomp) return cmd_gravcomp(gc);
    if (*eval) return cmd_eval(ev);
    if (*randomize) return cmd_randomize(rz, seed);
    std::cerr << app.help();
    return kExitError;
  } catch (const NumericalError& e) {
    logger().error("{}", e.what());
    return kExitNotConverged;
  } catch (const std::exception& e) {
    logger().error("{}", e.what());
    return kExitError;
  }
}

}  // namespace fungrasp::cli
