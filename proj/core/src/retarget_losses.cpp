#include <cmath>
#include <limits>

#include "fungrasp/contacts.hpp"
#include "fungrasp/error.hpp"
#include "fungrasp/log.hpp"
#include "fungrasp/retarget.hpp"

namespace fungrasp {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

// 1 inside `inner`, 0 beyond `outer`, C1 cubic in between.
struct Gate {
  double value;
  double slope;
};

Gate contact_gate(double d, double inner, double outer) {
  if (d <= inner) return {1.0, 0.0};
  if (d >= outer) return {0.0, 0.0};
  const double width = outer - inner;
  const double u = (d - inner) / width;
  return {1.0 - u * u * (3.0 - 2.0 * u), -6.0 * u * (1.0 - u) / width};
}

}  // namespace

void RetargetWeights::validate() const {
  for (double w : {pen, fc, pos, joints, col})
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("retarget weights must be finite and >= 0");
  if (!(tau_col > 0.0)) throw ValidationError("tau_col must be positive");
}

// ---------------------------------------------------------------------------

double loss_pen(const RobotHandModel& model, const RobotGrasp& grasp, const TriMeshObject& mesh) {
  const LinkFrames frames = compute_link_frames(model, grasp.wrist_pose.isometry(), grasp.joint_angles);
  double total = 0.0;
  for (std::size_t l = 0; l < model.link_count(); ++l)
    for (const Vec3& s : model.link(l).sample_points) total += std::max(-mesh.signed_distance(frames[l] * s), 0.0);
  return total;
}

double loss_fc(std::span<const Vec3> points, std::span<const Vec3> normals) {
  if (points.empty()) throw ValidationError("no contacts");
  if (points.size() != normals.size()) throw ValidationError("contact points and normals differ in length");
  Vec6 wrench = Vec6::Zero();
  for (std::size_t k = 0; k < points.size(); ++k) {
    wrench.head<3>() += normals[k];
    wrench.tail<3>() += points[k].cross(normals[k]);
  }
  return wrench.squaredNorm();
}

double loss_pos(const HumanGrasp& human, const RobotHandModel& model, const RobotGrasp& grasp) {
  const LinkFrames frames = compute_link_frames(model, grasp.wrist_pose.isometry(), grasp.joint_angles);
  double total = 0.0;
  for (std::size_t j = 0; j < kHumanJointCount; ++j) {
    if (!human.contacts[j]) continue;
    auto link = model.link_for_human_joint(static_cast<int>(j));
    if (!link) {
      logger().warn("contact joint '{}' has no robot counterpart; skipped", kHumanJointNames[j]);
      continue;
    }
    total += (human.joints[j] - frames[*link].translation()).squaredNorm();
  }
  return total;
}

double loss_joints(const RobotHandModel& model, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != model.dof()) throw ValidationError("configuration size mismatch");
  const Eigen::VectorXd lo = model.lower_limits();
  const Eigen::VectorXd hi = model.upper_limits();
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i)
    total += std::max(0.0, q[i] - hi[i]) + std::max(0.0, lo[i] - q[i]);
  return total;
}

double loss_col(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                const std::optional<TablePlane>& table, double tau) {
  if (!(tau > 0.0)) throw ValidationError("collision threshold tau must be positive");
  const LinkFrames frames = compute_link_frames(model, wrist.isometry(), q);
  const std::vector<Vec3> joints = joint_positions(model, frames);
  double total = 0.0;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    for (std::size_t j = 0; j < joints.size(); ++j)
      if (i != j) total += std::max(tau - (joints[i] - joints[j]).norm(), 0.0);
    if (table) total += std::max(-table_distance(*table, joints[i]), 0.0);
  }
  return total;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd RetargetObjective::Gradient::weighted(const RetargetWeights& w) const {
  return w.pen * pen + w.fc * fc + w.pos * pos + w.joints * joints + w.col * col;
}

RetargetObjective::RetargetObjective(const RobotHandModel& model, const HumanGrasp& human,
                                     std::vector<bool> target_contacts, const TriMeshObject& mesh,
                                     RetargetWeights weights, RetargetConfig config)
    : model_(model), mesh_(mesh), weights_(weights), config_(std::move(config)), object_pose_(human.object_pose) {
  weights_.validate();
  if (target_contacts.size() != model.contact_links().size())
    throw ValidationError("target contact flags do not match the model's contact links");
  for (std::size_t j = 0; j < kHumanJointCount; ++j) {
    if (!human.contacts[j]) continue;
    auto link = model.link_for_human_joint(static_cast<int>(j));
    if (!link) {
      logger().warn("contact joint '{}' has no robot counterpart; skipped", kHumanJointNames[j]);
      continue;
    }
    pos_pairs_.push_back({*link, human.joints[j]});
  }
  for (std::size_t k = 0; k < target_contacts.size(); ++k)
    if (target_contacts[k]) fc_links_.push_back(model.contact_links()[k]);
  if (fc_links_.empty())
    logger().warn("grasp reference has no usable contacts; contact position and force-closure terms are skipped");
}

void RetargetObjective::apply_increment(Pose6D& wrist, Eigen::VectorXd& q, const Eigen::VectorXd& delta) {
  wrist.rotation = (quaternion_from_rotation_vector(delta.head<3>()) * wrist.rotation).normalized();
  wrist.position += delta.segment<3>(3);
  q += delta.tail(q.size());
}

Eigen::MatrixXd RetargetObjective::parameter_jacobian(const LinkFrames& frames, const Pose6D& wrist,
                                                      std::size_t link, const Vec3& point) const {
  Eigen::MatrixXd jac(3, static_cast<Eigen::Index>(parameter_count()));
  jac.block<3, 3>(0, 0) = -skew(point - wrist.position);
  jac.block<3, 3>(0, 3).setIdentity();
  jac.rightCols(static_cast<Eigen::Index>(model_.dof())) = point_jacobian(model_, frames, link, point);
  return jac;
}

LossTerms RetargetObjective::evaluate(const Pose6D& wrist, const Eigen::VectorXd& q) const {
  const LinkFrames frames = compute_link_frames(model_, wrist.isometry(), q);
  LossTerms t;

  for (std::size_t l = 0; l < model_.link_count(); ++l)
    for (const Vec3& s : model_.link(l).sample_points) t.pen += std::max(-mesh_.signed_distance(frames[l] * s), 0.0);

  if (!fc_links_.empty()) {
    Vec6 wrench = Vec6::Zero();
    for (std::size_t link : fc_links_) {
      SurfaceQuery best;
      best.distance = std::numeric_limits<double>::infinity();
      for (const Vec3& s : model_.link(link).sample_points) {
        const SurfaceQuery sq = mesh_.query(frames[link] * s);
        if (sq.distance < best.distance) best = sq;
      }
      const Gate gate = contact_gate(best.distance, config_.fc_gate_inner, config_.fc_gate_outer);
      const Vec3 normal = -best.gradient;
      wrench.head<3>() += gate.value * normal;
      wrench.tail<3>() += gate.value * best.closest.cross(normal);
    }
    t.fc = wrench.squaredNorm();
  }

  for (const auto& pair : pos_pairs_) t.pos += (pair.human_point - frames[pair.link].translation()).squaredNorm();

  t.joints = loss_joints(model_, q);

  {
    const std::vector<Vec3> joints = joint_positions(model_, frames);
    for (std::size_t i = 0; i < joints.size(); ++i) {
      for (std::size_t j = i + 1; j < joints.size(); ++j)
        t.col += 2.0 * std::max(weights_.tau_col - (joints[i] - joints[j]).norm(), 0.0);
      if (config_.table) t.col += std::max(-table_distance(*config_.table, object_pose_ * joints[i]), 0.0);
    }
  }
  return t;
}

RetargetObjective::Gradient RetargetObjective::analytic_gradient(const Pose6D& wrist, const Eigen::VectorXd& q) const {
  const auto n = static_cast<Eigen::Index>(parameter_count());
  Gradient g{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n),
             Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  const LinkFrames frames = compute_link_frames(model_, wrist.isometry(), q);

  {
    for (std::size_t l = 0; l < model_.link_count(); ++l) {
      for (const Vec3& s : model_.link(l).sample_points) {
        const Vec3 p = frames[l] * s;
        const SurfaceQuery sq = mesh_.query(p);
        if (sq.distance < 0.0) g.pen -= parameter_jacobian(frames, wrist, l, p).transpose() * sq.gradient;
      }
    }
  }

  if (!fc_links_.empty()) {
    Vec6 wrench = Vec6::Zero();
    // d(wrench)/d(params), accumulated per contact.
    Eigen::MatrixXd dwrench = Eigen::MatrixXd::Zero(6, n);
    for (std::size_t link : fc_links_) {
      SurfaceQuery best;
      best.distance = std::numeric_limits<double>::infinity();
      Vec3 best_point = Vec3::Zero();
      for (const Vec3& s : model_.link(link).sample_points) {
        const Vec3 p = frames[link] * s;
        const SurfaceQuery sq = mesh_.query(p);
        if (sq.distance < best.distance) {
          best = sq;
          best_point = p;
        }
      }
      const Gate gate = contact_gate(best.distance, config_.fc_gate_inner, config_.fc_gate_outer);
      if (gate.value == 0.0 && gate.slope == 0.0) continue;
      const Vec3 normal = -best.gradient;
      const Vec3& x = best.closest;
      Vec6 w_k;
      w_k << normal, x.cross(normal);
      wrench += gate.value * w_k;

      const SurfaceDerivatives der = TriMeshObject::derivatives(best, best_point);
      const Mat3 dn = -der.gradient;
      const Mat3 dx = der.closest;
      Eigen::Matrix<double, 6, 3> dw_dp;
      dw_dp.topRows<3>() = dn;
      dw_dp.bottomRows<3>() = -skew(normal) * dx + skew(x) * dn;
      const Eigen::Matrix<double, 6, 3> total_dp = gate.value * dw_dp + w_k * (gate.slope * best.gradient.transpose());
      dwrench += total_dp * parameter_jacobian(frames, wrist, link, best_point);
    }
    g.fc = 2.0 * dwrench.transpose() * wrench;
  }

  {
    for (const auto& pair : pos_pairs_) {
      const Vec3 p = frames[pair.link].translation();
      g.pos += 2.0 * parameter_jacobian(frames, wrist, pair.link, p).transpose() * (p - pair.human_point);
    }
  }

  {
    const Eigen::VectorXd lo = model_.lower_limits();
    const Eigen::VectorXd hi = model_.upper_limits();
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      if (q[i] > hi[i]) g.joints[6 + i] = 1.0;
      if (q[i] < lo[i]) g.joints[6 + i] = -1.0;
    }
  }

  {
    const std::vector<Vec3> joints = joint_positions(model_, frames);
    std::vector<Eigen::MatrixXd> jacs;
    jacs.reserve(joints.size());
    for (std::size_t i = 0; i < joints.size(); ++i)
      jacs.push_back(parameter_jacobian(frames, wrist, model_.link_of_joint(i), joints[i]));
    const Eigen::RowVector3d up_in_object = object_pose_.rotation.toRotationMatrix().row(2);
    for (std::size_t i = 0; i < joints.size(); ++i) {
      for (std::size_t j = i + 1; j < joints.size(); ++j) {
        const Vec3 diff = joints[i] - joints[j];
        const double d = diff.norm();
        if (d < weights_.tau_col && d > 0.0)
          g.col -= 2.0 * (jacs[i] - jacs[j]).transpose() * (diff / d);
      }
      if (config_.table && table_distance(*config_.table, object_pose_ * joints[i]) < 0.0)
        g.col -= (up_in_object * jacs[i]).transpose();
    }
  }
  return g;
}

RetargetObjective::Gradient RetargetObjective::finite_difference_gradient(const Pose6D& wrist,
                                                                          const Eigen::VectorXd& q,
                                                                          double h) const {
  const auto n = static_cast<Eigen::Index>(parameter_count());
  Gradient g{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n),
             Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    delta[i] = h;
    Pose6D wp = wrist;
    Eigen::VectorXd qp = q;
    apply_increment(wp, qp, delta);
    Pose6D wm = wrist;
    Eigen::VectorXd qm = q;
    apply_increment(wm, qm, -delta);
    const LossTerms plus = evaluate(wp, qp);
    const LossTerms minus = evaluate(wm, qm);
    const double inv = 1.0 / (2.0 * h);
    g.pen[i] = (plus.pen - minus.pen) * inv;
    g.fc[i] = (plus.fc - minus.fc) * inv;
    g.pos[i] = (plus.pos - minus.pos) * inv;
    g.joints[i] = (plus.joints - minus.joints) * inv;
    g.col[i] = (plus.col - minus.col) * inv;
  }
  return g;
}

}  // namespace fungrasp
