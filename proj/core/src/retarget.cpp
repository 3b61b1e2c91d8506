#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "fungrasp/error.hpp"
#include "fungrasp/log.hpp"
#include "fungrasp/retarget.hpp"

namespace fungrasp {

namespace {

constexpr int kMaxAlternations = 200;
constexpr int kMaxFingerIterations = 100;
constexpr int kMaxPolishIterations = 200;
constexpr double kTipScale = 0.01;  // m

// Rigid transform (R, t) minimizing sum |R src_i + t - dst_i|^2.
Pose6D kabsch(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  const auto n = static_cast<double>(src.size());
  Vec3 cs = Vec3::Zero();
  Vec3 cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= n;
  cd /= n;
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - cs) * (dst[i] - cd).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  Pose6D pose;
  pose.rotation = Eigen::Quaterniond(r).normalized();
  pose.position = cd - pose.rotation * cs;
  return pose;
}

struct DirectionPair {
  std::size_t from_link;
  std::size_t to_link;
  Vec3 human_direction;
};

struct FingerFit {
  std::vector<std::size_t> joints;
  std::vector<DirectionPair> pairs;
};

// Directions between consecutive mapped links along each finger chain.
std::vector<FingerFit> finger_fits(const RobotHandModel& model, const HumanGrasp& human) {
  std::vector<FingerFit> fits;
  for (const auto& chain : model.finger_chains()) {
    FingerFit fit;
    for (std::size_t link : chain)
      if (auto j = model.joint_of_link(link)) fit.joints.push_back(*j);
    std::optional<std::pair<std::size_t, int>> prev;
    for (std::size_t link : chain) {
      auto it = model.human_map().find(model.link(link).name);
      if (it == model.human_map().end()) continue;
      if (prev) {
        const Vec3 d = human.joints[static_cast<std::size_t>(it->second)] -
                       human.joints[static_cast<std::size_t>(prev->second)];
        if (d.norm() > 1e-12) fit.pairs.push_back({prev->first, link, d.normalized()});
      }
      prev = std::make_pair(link, it->second);
    }
    if (!fit.joints.empty() && !fit.pairs.empty()) fits.push_back(std::move(fit));
  }
  return fits;
}

Eigen::VectorXd direction_residual(const RobotHandModel& model, const Eigen::Isometry3d& wrist,
                                   const Eigen::VectorXd& q, const FingerFit& fit) {
  const LinkFrames frames = compute_link_frames(model, wrist, q);
  Eigen::VectorXd r(3 * static_cast<Eigen::Index>(fit.pairs.size()));
  for (std::size_t k = 0; k < fit.pairs.size(); ++k) {
    const Vec3 d = frames[fit.pairs[k].to_link].translation() - frames[fit.pairs[k].from_link].translation();
    r.segment<3>(3 * static_cast<Eigen::Index>(k)) = d.normalized() - fit.pairs[k].human_direction;
  }
  return r;
}

// Minimizes sum(1 - cos) = 0.5 * |r|^2 over the finger's joints with a
// projected Levenberg-Marquardt iteration.
void fit_finger(const RobotHandModel& model, const Eigen::Isometry3d& wrist, Eigen::VectorXd& q,
                const FingerFit& fit) {
  const Eigen::VectorXd lo = model.lower_limits();
  const Eigen::VectorXd hi = model.upper_limits();
  const auto nj = static_cast<Eigen::Index>(fit.joints.size());
  double lambda = 1e-3;
  Eigen::VectorXd r = direction_residual(model, wrist, q, fit);
  double cost = r.squaredNorm();
  for (int it = 0; it < kMaxFingerIterations && cost > 1e-30; ++it) {
    Eigen::MatrixXd jac(r.size(), nj);
    constexpr double h = 1e-7;
    for (Eigen::Index c = 0; c < nj; ++c) {
      const auto j = static_cast<Eigen::Index>(fit.joints[static_cast<std::size_t>(c)]);
      Eigen::VectorXd qp = q;
      Eigen::VectorXd qm = q;
      qp[j] += h;
      qm[j] -= h;
      jac.col(c) = (direction_residual(model, wrist, qp, fit) - direction_residual(model, wrist, qm, fit)) / (2 * h);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const Eigen::VectorXd step = lhs.ldlt().solve(-jtr);
      Eigen::VectorXd cand = q;
      for (Eigen::Index c = 0; c < nj; ++c) {
        const auto j = static_cast<Eigen::Index>(fit.joints[static_cast<std::size_t>(c)]);
        cand[j] = std::clamp(cand[j] + step[c], lo[j], hi[j]);
      }
      const Eigen::VectorXd r_new = direction_residual(model, wrist, cand, fit);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        const double change = (cand - q).norm();
        q = cand;
        r = r_new;
        cost = cost_new;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (change < 1e-15) return;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) return;
  }
}

// Joint refinement of wrist and fingers on fingertip positions (per 1 cm)
// and all finger link directions, projected Levenberg-Marquardt.
Eigen::VectorXd init_residual(const RobotHandModel& model, const std::vector<FingerFit>& fits,
                              const std::vector<std::size_t>& tips, const std::vector<Vec3>& human_tips,
                              const Pose6D& wrist, const Eigen::VectorXd& q) {
  const LinkFrames frames = compute_link_frames(model, wrist.isometry(), q);
  std::size_t rows = 3 * tips.size();
  for (const auto& fit : fits) rows += 3 * fit.pairs.size();
  Eigen::VectorXd r(static_cast<Eigen::Index>(rows));
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < tips.size(); ++k, row += 3)
    r.segment<3>(row) = (frames[tips[k]].translation() - human_tips[k]) / kTipScale;
  for (const auto& fit : fits) {
    for (const auto& pair : fit.pairs) {
      const Vec3 d = frames[pair.to_link].translation() - frames[pair.from_link].translation();
      r.segment<3>(row) = d.normalized() - pair.human_direction;
      row += 3;
    }
  }
  return r;
}

void polish(const RobotHandModel& model, const std::vector<FingerFit>& fits, const std::vector<std::size_t>& tips,
            const std::vector<Vec3>& human_tips, Pose6D& wrist, Eigen::VectorXd& q) {
  const Eigen::VectorXd lo = model.lower_limits();
  const Eigen::VectorXd hi = model.upper_limits();
  const auto n = static_cast<Eigen::Index>(6 + model.dof());
  auto apply = [&](const Pose6D& w, const Eigen::VectorXd& qq, const Eigen::VectorXd& delta) {
    Pose6D w2 = w;
    Eigen::VectorXd q2 = qq;
    RetargetObjective::apply_increment(w2, q2, delta);
    return std::make_pair(w2, Eigen::VectorXd(q2.cwiseMax(lo).cwiseMin(hi)));
  };
  Eigen::VectorXd r = init_residual(model, fits, tips, human_tips, wrist, q);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < kMaxPolishIterations && cost > 1e-30; ++it) {
    Eigen::MatrixXd jac(r.size(), n);
    constexpr double h = 1e-7;
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[c] = h;
      Pose6D wp = wrist, wm = wrist;
      Eigen::VectorXd qp = q, qm = q;
      RetargetObjective::apply_increment(wp, qp, e);
      RetargetObjective::apply_increment(wm, qm, -e);
      jac.col(c) = (init_residual(model, fits, tips, human_tips, wp, qp) -
                    init_residual(model, fits, tips, human_tips, wm, qm)) / (2 * h);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const auto [cw, cq] = apply(wrist, q, lhs.ldlt().solve(-jtr));
      const Eigen::VectorXd r_new = init_residual(model, fits, tips, human_tips, cw, cq);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        const double gain = cost - cost_new;
        wrist = cw;
        q = cq;
        r = r_new;
        cost = cost_new;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (gain < 1e-30) return;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) return;
  }
}

}  // namespace

RobotGrasp initialize_grasp(const RobotHandModel& model, const HumanGrasp& human) {
  std::vector<std::size_t> tip_links;
  std::vector<Vec3> human_tips;
  for (const auto& chain : model.finger_chains()) {
    auto it = model.human_map().find(model.link(chain.back()).name);
    if (it == model.human_map().end()) continue;
    tip_links.push_back(chain.back());
    human_tips.push_back(human.joints[static_cast<std::size_t>(it->second)]);
  }
  if (tip_links.size() < 3)
    throw ValidationError("initialization needs at least 3 mapped fingertips, found " +
                          std::to_string(tip_links.size()));

  // Kabsch over every mapped link; the wrist and finger bases anchor the
  // rotation while the fingers are still wrong.
  std::vector<std::size_t> anchor_links;
  std::vector<Vec3> human_anchors;
  for (const auto& [link, joint] : model.mapped_links()) {
    anchor_links.push_back(link);
    human_anchors.push_back(human.joints[static_cast<std::size_t>(joint)]);
  }

  const std::vector<FingerFit> fits = finger_fits(model, human);
  Eigen::VectorXd q = model.clamp_to_limits(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof())));
  Pose6D wrist;
  for (int round = 0; round < kMaxAlternations; ++round) {
    const LinkFrames local = compute_link_frames(model, Eigen::Isometry3d::Identity(), q);
    std::vector<Vec3> robot_anchors;
    for (std::size_t link : anchor_links) robot_anchors.push_back(local[link].translation());
    const Pose6D next_wrist = kabsch(robot_anchors, human_anchors);

    const Eigen::VectorXd q_before = q;
    for (const FingerFit& fit : fits) fit_finger(model, next_wrist.isometry(), q, fit);

    const double wrist_change = (next_wrist.position - wrist.position).norm() +
                                rotation_vector(next_wrist.rotation * wrist.rotation.conjugate()).norm();
    wrist = next_wrist;
    if (round > 0 && wrist_change < 1e-10 && (q - q_before).norm() < 1e-10) break;
  }
  polish(model, fits, tip_links, human_tips, wrist, q);

  RobotGrasp grasp;
  grasp.wrist_pose = wrist;
  grasp.joint_angles = q;
  grasp.object_mesh_id = human.object_mesh_id;
  for (std::size_t link : model.contact_links()) {
    auto it = model.human_map().find(model.link(link).name);
    grasp.link_contacts.push_back(it != model.human_map().end() && human.contacts[static_cast<std::size_t>(it->second)]);
  }
  return grasp;
}

RetargetResult optimize_grasp(const RobotHandModel& model, const HumanGrasp& human, const TriMeshObject& mesh,
                              const RetargetWeights& weights, const RetargetConfig& config) {
  RetargetResult result;
  result.grasp = initialize_grasp(model, human);
  const RetargetObjective objective(model, human, result.grasp.link_contacts, mesh, weights, config);

  Pose6D wrist = result.grasp.wrist_pose;
  Eigen::VectorXd q = result.grasp.joint_angles;

  auto check_finite = [&](const LossTerms& t, int iteration) {
    const double total = t.weighted(weights);
    if (!std::isfinite(total)) {
      std::ostringstream msg;
      msg << "retargeting loss is not finite at iteration " << iteration << " (pen=" << t.pen << ", fc=" << t.fc
          << ", pos=" << t.pos << ", joints=" << t.joints << ", col=" << t.col << ")";
      throw NumericalError(msg.str());
    }
    return total;
  };

  LossTerms terms = objective.evaluate(wrist, q);
  double total = check_finite(terms, 0);
  result.loss_history.push_back({0, total, terms});

  const auto n = static_cast<Eigen::Index>(objective.parameter_count());
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  int rejections = 0;

  for (int it = 1; it <= config.max_iters; ++it) {
    result.iterations = it;
    const RetargetObjective::Gradient grad = config.gradient == GradientMode::Analytic
                                                 ? objective.analytic_gradient(wrist, q)
                                                 : objective.finite_difference_gradient(wrist, q, config.fd_step);
    const Eigen::VectorXd g = grad.weighted(weights);
    if (!g.allFinite()) throw NumericalError("retargeting gradient is not finite at iteration " + std::to_string(it));

    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    const double bc1 = 1.0 - std::pow(config.beta1, it);
    const double bc2 = 1.0 - std::pow(config.beta2, it);
    const Eigen::VectorXd step =
        config.learning_rate * (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + config.epsilon).matrix());

    bool accepted = false;
    double scale = 1.0;
    for (int k = 0; k <= config.max_backtracks; ++k, scale *= 0.5) {
      Pose6D cand_wrist = wrist;
      Eigen::VectorXd cand_q = q;
      RetargetObjective::apply_increment(cand_wrist, cand_q, -scale * step);
      if (config.project_to_limits) cand_q = model.clamp_to_limits(cand_q);
      const LossTerms cand_terms = objective.evaluate(cand_wrist, cand_q);
      const double cand_total = check_finite(cand_terms, it);
      if (cand_total <= total) {
        const double delta = total - cand_total;
        wrist = cand_wrist;
        q = cand_q;
        terms = cand_terms;
        total = cand_total;
        result.loss_history.push_back({it, total, terms});
        accepted = true;
        if (delta < config.tol) result.converged = true;
        break;
      }
    }
    if (accepted) {
      rejections = 0;
      if (result.converged) break;
    } else if (++rejections >= config.max_rejections) {
      result.converged = true;
      break;
    }
  }

  result.grasp.wrist_pose = wrist;
  result.grasp.joint_angles = q;
  return result;
}

std::string loss_history_csv(const std::vector<LossRecord>& history) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,total,pen,fc,pos,joints,col\n";
  for (const auto& r : history)
    out << r.iteration << ',' << r.total << ',' << r.terms.pen << ',' << r.terms.fc << ',' << r.terms.pos << ','
        << r.terms.joints << ',' << r.terms.col << '\n';
  return out.str();
}

}  // namespace fungrasp
