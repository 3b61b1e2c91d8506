#include "fungrasp/rewards.hpp"

#include <cmath>

#include "fungrasp/error.hpp"
#include "fungrasp/kinematics.hpp"
#include "fungrasp/log.hpp"

namespace fungrasp {

void RewardWeights::validate() const {
  if (!(beta_p > 0.0) || !std::isfinite(beta_p)) throw ValidationError("beta_p must be positive");
  if (!std::isfinite(w_p) || !std::isfinite(w_s) || !std::isfinite(w_q))
    throw ValidationError("reward weights must be finite");
}

void SimState::validate(const RobotHandModel& model) const {
  const std::size_t c = model.contact_links().size();
  if (static_cast<std::size_t>(q.size()) != model.dof()) throw ValidationError("state q does not match the model");
  if (static_cast<std::size_t>(reference.joint_angles.size()) != model.dof())
    throw ValidationError("reference joint angles do not match the model");
  if (contacts.size() != c || reference.link_contacts.size() != c)
    throw ValidationError("contact flags must cover every contact-capable link");
  if (forces.size() != 0 && static_cast<std::size_t>(forces.size()) != c)
    throw ValidationError("contact forces must cover every contact-capable link");
  if ((forces.array() < 0.0).any()) throw ValidationError("contact forces must be nonnegative");
}

const FeatureLayout::Block& FeatureLayout::block(std::string_view name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw ValidationError("unknown feature block " + std::string(name));
}

Eigen::VectorXd FeatureVector::segment(std::string_view name) const {
  const auto& b = layout.block(name);
  return values.segment(b.offset, b.size);
}

FeatureLayout feature_layout(const RobotHandModel& model) {
  const auto m = static_cast<Eigen::Index>(model.dof());
  const auto c = static_cast<Eigen::Index>(model.contact_links().size());
  const auto mapped = static_cast<Eigen::Index>(model.mapped_links().size());
  FeatureLayout layout;
  Eigen::Index offset = 0;
  auto add = [&](const char* name, Eigen::Index size) {
    layout.blocks.push_back({name, offset, size});
    offset += size;
  };
  add("q", m);
  add("wrist", 6);
  add("wrist_velocity", 6);
  add("object", 6);
  add("object_velocity", 6);
  add("object_displacement", 3);
  add("wrist_table_height", 1);
  add("forces", c);
  add("position_gap", 3 * mapped);
  add("rotation_gap", 3);
  add("contact_gap", 2 * c);
  return layout;
}

Pose6D target_wrist_world(const SimState& state) { return state.object * state.reference.wrist_pose; }

FeatureVector extract_features(const RobotHandModel& model, const SimState& state, const TablePlane& plane) {
  state.validate(model);
  FeatureVector out;
  out.layout = feature_layout(model);
  out.values = Eigen::VectorXd::Zero(out.layout.size());
  auto put = [&](const char* name, const Eigen::VectorXd& v) {
    const auto& b = out.layout.block(name);
    out.values.segment(b.offset, b.size) = v;
  };
  auto cat = [](const Vec3& a, const Vec3& b) {
    Eigen::VectorXd v(6);
    v << a, b;
    return v;
  };

  const Eigen::Quaterniond to_wrist = state.wrist.rotation.conjugate();
  const std::size_t c = model.contact_links().size();

  put("q", state.q);
  put("wrist", cat(to_wrist * (state.wrist.position - state.object_initial_position), to_wrist * Vec3::UnitZ()));
  put("wrist_velocity", cat(to_wrist * state.wrist_velocity.linear, to_wrist * state.wrist_velocity.angular));
  put("object", cat(to_wrist * (state.object.position - state.wrist.position),
                    rotation_vector(to_wrist * state.object.rotation)));
  put("object_velocity", cat(to_wrist * state.object_velocity.linear, to_wrist * state.object_velocity.angular));
  put("object_displacement", to_wrist * (state.object.position - state.object_initial_position));
  put("wrist_table_height", Eigen::VectorXd::Constant(1, table_distance(plane, state.wrist.position)));
  if (state.forces.size() != 0) put("forces", state.forces);

  const Pose6D target = target_wrist_world(state);
  const LinkFrames current = compute_link_frames(model, state.wrist.isometry(), state.q);
  const LinkFrames goal = compute_link_frames(model, target.isometry(), state.reference.joint_angles);
  Eigen::VectorXd gap(3 * static_cast<Eigen::Index>(model.mapped_links().size()));
  for (std::size_t k = 0; k < model.mapped_links().size(); ++k) {
    const std::size_t link = model.mapped_links()[k].first;
    gap.segment<3>(3 * static_cast<Eigen::Index>(k)) =
        to_wrist * (goal[link].translation() - current[link].translation());
  }
  put("position_gap", gap);
  put("rotation_gap", rotation_vector(to_wrist * target.rotation));

  Eigen::VectorXd gc(2 * static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < c; ++i) {
    const double target_c = state.reference.link_contacts[i] ? 1.0 : 0.0;
    gc[static_cast<Eigen::Index>(i)] = target_c;
    gc[static_cast<Eigen::Index>(c + i)] = target_c - (state.contacts[i] ? 1.0 : 0.0);
  }
  put("contact_gap", gc);
  return out;
}

double reward_position(const RobotHandModel& model, const SimState& state, double beta_p) {
  state.validate(model);
  if (!(beta_p > 0.0)) throw ValidationError("beta_p must be positive");
  const LinkFrames current = compute_link_frames(model, state.wrist.isometry(), state.q);
  const LinkFrames goal =
      compute_link_frames(model, target_wrist_world(state).isometry(), state.reference.joint_angles);
  double total_gap = 0.0;
  for (const auto& [link, human] : model.mapped_links())
    total_gap += (goal[link].translation() - current[link].translation()).norm();
  return std::exp(-beta_p * total_gap);
}

double contact_weight(const RobotHandModel& model, const SimState& state) {
  state.validate(model);
  const Eigen::Isometry3d to_object = state.object.inverse().isometry();
  const LinkFrames current = compute_link_frames(model, to_object * state.wrist.isometry(), state.q);
  const LinkFrames goal =
      compute_link_frames(model, state.reference.wrist_pose.isometry(), state.reference.joint_angles);
  double num = 0.0;
  double den = 0.0;
  const auto links = model.contact_links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!state.reference.link_contacts[i]) continue;
    num += current[links[i]].translation().squaredNorm();
    den += goal[links[i]].translation().squaredNorm();
  }
  if (!(den > 0.0)) {
    logger().warn("contact weight: reference has no target contacts away from the object origin; using 0");
    return 0.0;
  }
  return num / den;
}

double reward_contact(const SimState& state) {
  if (state.contacts.size() != state.reference.link_contacts.size())
    throw ValidationError("contact flags do not match the reference");
  std::size_t target = 0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < state.contacts.size(); ++i) {
    if (!state.reference.link_contacts[i]) continue;
    ++target;
    if (state.contacts[i]) ++hit;
  }
  if (target == 0) {
    logger().warn("contact reward: reference has no target contacts; using 0");
    return 0.0;
  }
  return static_cast<double>(hit) / static_cast<double>(target);
}

double reward_safety(std::span<const double> collision_forces) {
  double sum = 0.0;
  for (double f : collision_forces) sum += std::abs(f);
  return -sum;
}

double reward_pose(const std::vector<std::vector<Vec3>>& current, const std::vector<std::vector<Vec3>>& target) {
  if (current.size() != target.size()) throw ValidationError("pose reward: finger counts differ");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < current.size(); ++f) {
    if (current[f].size() != target[f].size()) throw ValidationError("pose reward: link counts differ");
    for (std::size_t j = 0; j < current[f].size(); ++j) {
      const double denom = current[f][j].norm() * target[f][j].norm();
      if (!(denom > 0.0)) throw ValidationError("pose reward: zero-length direction");
      sum += std::clamp(current[f][j].dot(target[f][j]) / denom, -1.0, 1.0) - 1.0;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double reward_pose(const RobotHandModel& model, const SimState& state) {
  state.validate(model);
  const Pose6D wrist_in_object = state.object.inverse() * state.wrist;
  return reward_pose(link_directions(model, wrist_in_object, state.q),
                     link_directions(model, state.reference.wrist_pose, state.reference.joint_angles));
}

RewardTerms reward_terms(const RewardWeights& weights, const RobotHandModel& model, const SimState& state,
                         std::span<const double> collision_forces) {
  weights.validate();
  RewardTerms t;
  t.r_p = reward_position(model, state, weights.beta_p);
  t.omega_c = contact_weight(model, state);
  t.r_c = t.omega_c == 0.0 ? 0.0 : reward_contact(state);
  t.r_s = reward_safety(collision_forces);
  t.r_q = reward_pose(model, state);
  t.total = weights.w_p * t.r_p + t.omega_c * t.r_c + weights.w_s * t.r_s + weights.w_q * t.r_q;
  return t;
}

double total_reward(const RewardWeights& weights, const RobotHandModel& model, const SimState& state,
                    std::span<const double> collision_forces) {
  return reward_terms(weights, model, state, collision_forces).total;
}

double loss_contact_reconstruction(const Eigen::VectorXd& c_hat, const Eigen::VectorXd& c,
                                   const Eigen::VectorXd& f_hat, const Eigen::VectorXd& f) {
  if (c_hat.size() != c.size() || f_hat.size() != f.size())
    throw ValidationError("reconstruction loss: size mismatch");
  return (c_hat - c).squaredNorm() + (f_hat - f).squaredNorm();
}

double loss_action_imitation(const Eigen::VectorXd& a_hat, const Eigen::VectorXd& a) {
  if (a_hat.size() != a.size()) throw ValidationError("imitation loss: size mismatch");
  return (a_hat - a).squaredNorm();
}

}  // namespace fungrasp
