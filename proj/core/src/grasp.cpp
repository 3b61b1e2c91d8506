#include "fungrasp/grasp.hpp"

#include <algorithm>

#include "fungrasp/error.hpp"
#include "fungrasp/log.hpp"
#include "json_util.hpp"

namespace fungrasp {

const std::array<std::string_view, kHumanJointCount> kHumanJointNames = {
    "wrist",      "thumb_cmc",  "thumb_mcp",  "thumb_ip",   "thumb_tip",  "index_mcp", "index_pip",
    "index_dip",  "index_tip",  "middle_mcp", "middle_pip", "middle_dip", "middle_tip", "ring_mcp",
    "ring_pip",   "ring_dip",   "ring_tip",   "pinky_mcp",  "pinky_pip",  "pinky_dip", "pinky_tip"};

void HumanGrasp::validate() const {
  if (contacts[0]) throw ValidationError("human grasp: the wrist cannot carry a contact flag");
  for (const auto& p : joints)
    if (!p.allFinite()) throw ValidationError("human grasp: non-finite joint position");
  for (std::size_t finger = 0; finger < 5; ++finger) {
    std::size_t prev = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t idx = 1 + 4 * finger + k;
      if ((joints[idx] - joints[prev]).norm() < 1e-9)
        throw ValidationError("human grasp: joints '" + std::string(kHumanJointNames[prev]) + "' and '" +
                              std::string(kHumanJointNames[idx]) + "' coincide");
      prev = idx;
    }
  }
}

std::size_t HumanGrasp::contact_count() const {
  return static_cast<std::size_t>(std::count(contacts.begin(), contacts.end(), true));
}

std::size_t RobotGrasp::contact_count() const {
  return static_cast<std::size_t>(std::count(link_contacts.begin(), link_contacts.end(), true));
}

void validate_robot_grasp(const RobotGrasp& grasp, const RobotHandModel& model, double limit_tol) {
  if (static_cast<std::size_t>(grasp.joint_angles.size()) != model.dof())
    throw ValidationError("robot grasp: expected " + std::to_string(model.dof()) + " joint angles, got " +
                          std::to_string(grasp.joint_angles.size()));
  if (grasp.link_contacts.size() != model.contact_links().size())
    throw ValidationError("robot grasp: contact flags do not match the model's contact links");
  if (!grasp.wrist_pose.is_normalized()) throw ValidationError("robot grasp: wrist quaternion is not unit norm");
  const Eigen::VectorXd lo = model.lower_limits();
  const Eigen::VectorXd hi = model.upper_limits();
  for (std::size_t j = 0; j < model.dof(); ++j) {
    const double v = grasp.joint_angles[static_cast<Eigen::Index>(j)];
    if (!std::isfinite(v) || v < lo[j] - limit_tol || v > hi[j] + limit_tol)
      throw ValidationError("robot grasp: joint '" + model.link(model.link_of_joint(j)).name +
                            "' outside its limits");
  }
  if (grasp.contact_count() == 0) logger().warn("robot grasp has no contact flags set");
}

namespace {
using detail::json;
}

HumanGrasp parse_human_grasp(std::string_view text) {
  const json doc = detail::parse_json(text, "human grasp");
  const char* ctx = "human grasp";
  detail::require_keys_subset(doc, {"joints", "contacts", "wrist_pose", "object_pose", "object_mesh_id"}, ctx);
  HumanGrasp g;
  const json& joints = detail::require(doc, "joints", ctx);
  if (!joints.is_array() || joints.size() != kHumanJointCount)
    throw ValidationError("human grasp: exactly 21 joints are required");
  for (std::size_t i = 0; i < kHumanJointCount; ++i) g.joints[i] = detail::read_vec3(joints[i], "human grasp.joints");
  const json& contacts = detail::require(doc, "contacts", ctx);
  if (!contacts.is_array() || contacts.size() != kHumanJointCount)
    throw ValidationError("human grasp: exactly 21 contact flags are required");
  for (std::size_t i = 0; i < kHumanJointCount; ++i) {
    const json& c = contacts[i];
    if (c.is_boolean()) {
      g.contacts[i] = c.get<bool>();
    } else if (c.is_number_integer() && (c.get<int>() == 0 || c.get<int>() == 1)) {
      g.contacts[i] = c.get<int>() == 1;
    } else {
      throw ParseError("human grasp.contacts: expected 0/1 flags");
    }
  }
  g.wrist_pose = detail::read_pose(detail::require(doc, "wrist_pose", ctx), "human grasp.wrist_pose");
  if (doc.contains("object_pose")) g.object_pose = detail::read_pose(doc["object_pose"], "human grasp.object_pose");
  if (doc.contains("object_mesh_id")) {
    if (!doc["object_mesh_id"].is_string()) throw ParseError("human grasp.object_mesh_id: expected a string");
    g.object_mesh_id = doc["object_mesh_id"].get<std::string>();
  }
  g.validate();
  return g;
}

HumanGrasp load_human_grasp(const std::filesystem::path& path) {
  return parse_human_grasp(detail::read_text_file(path));
}

std::string serialize_human_grasp(const HumanGrasp& grasp) {
  json joints = json::array();
  for (const auto& p : grasp.joints) joints.push_back(detail::write_vec3(p));
  json contacts = json::array();
  for (bool c : grasp.contacts) contacts.push_back(c ? 1 : 0);
  json doc = {{"joints", joints},
              {"contacts", contacts},
              {"wrist_pose", detail::write_pose(grasp.wrist_pose)},
              {"object_pose", detail::write_pose(grasp.object_pose)},
              {"object_mesh_id", grasp.object_mesh_id}};
  return doc.dump(2) + "\n";
}

RobotGrasp parse_robot_grasp(std::string_view text, const RobotHandModel& model) {
  const json doc = detail::parse_json(text, "robot grasp");
  const char* ctx = "robot grasp";
  detail::require_keys_subset(doc, {"wrist_pose", "joint_angles", "link_contacts", "object_mesh_id"}, ctx);
  RobotGrasp g;
  g.wrist_pose = detail::read_pose(detail::require(doc, "wrist_pose", ctx), "robot grasp.wrist_pose");
  const json& q = detail::require(doc, "joint_angles", ctx);
  if (!q.is_array()) throw ParseError("robot grasp.joint_angles: expected an array");
  g.joint_angles.resize(static_cast<Eigen::Index>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i)
    g.joint_angles[static_cast<Eigen::Index>(i)] = detail::read_number(q[i], "robot grasp.joint_angles");

  const json& contacts = detail::require(doc, "link_contacts", ctx);
  if (!contacts.is_object()) throw ParseError("robot grasp.link_contacts: expected an object of link -> 0/1");
  g.link_contacts.assign(model.contact_links().size(), false);
  for (const auto& [name, value] : contacts.items()) {
    const std::size_t link = model.link_index(name);
    auto cl = model.contact_links();
    auto it = std::find(cl.begin(), cl.end(), link);
    if (it == cl.end()) throw ValidationError("robot grasp: link '" + name + "' is not contact-capable");
    if (!(value.is_number_integer() || value.is_boolean()))
      throw ParseError("robot grasp.link_contacts: expected 0/1 flags");
    g.link_contacts[static_cast<std::size_t>(it - cl.begin())] =
        value.is_boolean() ? value.get<bool>() : value.get<int>() != 0;
  }
  if (doc.contains("object_mesh_id")) {
    if (!doc["object_mesh_id"].is_string()) throw ParseError("robot grasp.object_mesh_id: expected a string");
    g.object_mesh_id = doc["object_mesh_id"].get<std::string>();
  }
  validate_robot_grasp(g, model);
  return g;
}

RobotGrasp load_robot_grasp(const std::filesystem::path& path, const RobotHandModel& model) {
  return parse_robot_grasp(detail::read_text_file(path), model);
}

std::string serialize_robot_grasp(const RobotGrasp& grasp, const RobotHandModel& model) {
  json q = json::array();
  for (Eigen::Index i = 0; i < grasp.joint_angles.size(); ++i) q.push_back(grasp.joint_angles[i]);
  json contacts = json::object();
  const auto cl = model.contact_links();
  for (std::size_t i = 0; i < cl.size() && i < grasp.link_contacts.size(); ++i)
    contacts[model.link(cl[i]).name] = grasp.link_contacts[i] ? 1 : 0;
  json doc = {{"wrist_pose", detail::write_pose(grasp.wrist_pose)},
              {"joint_angles", q},
              {"link_contacts", contacts},
              {"object_mesh_id", grasp.object_mesh_id}};
  return doc.dump(2) + "\n";
}

}  // namespace fungrasp
