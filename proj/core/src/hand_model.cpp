#include "fungrasp/hand_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fungrasp/error.hpp"
#include "json_util.hpp"

namespace fungrasp {

namespace {

constexpr int kHumanJointCount = 21;

bool vec_equal(const Vec3& a, const Vec3& b) { return (a.array() == b.array()).all(); }

}  // namespace

bool Link::operator==(const Link& other) const {
  if (sample_points.size() != other.sample_points.size()) return false;
  for (std::size_t i = 0; i < sample_points.size(); ++i)
    if (!vec_equal(sample_points[i], other.sample_points[i])) return false;
  return name == other.name && parent == other.parent && joint_type == other.joint_type &&
         vec_equal(axis, other.axis) && vec_equal(origin_xyz, other.origin_xyz) &&
         vec_equal(origin_rpy, other.origin_rpy) && limit_lower == other.limit_lower &&
         limit_upper == other.limit_upper && mass == other.mass && vec_equal(com, other.com) &&
         contact == other.contact;
}

RobotHandModel::RobotHandModel(std::string name, std::vector<Link> links,
                               std::vector<std::vector<std::string>> fingers,
                               std::map<std::string, int> human_map)
    : name_(std::move(name)),
      links_(std::move(links)),
      fingers_(std::move(fingers)),
      human_map_(std::move(human_map)) {
  const std::size_t n = links_.size();
  if (n == 0) throw ValidationError("robot description has no links");

  std::set<std::string> names;
  for (const auto& l : links_) {
    if (l.name.empty()) throw ValidationError("link with empty name");
    if (!names.insert(l.name).second) throw ValidationError("duplicate link name '" + l.name + "'");
  }

  parents_.assign(n, -1);
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < n; ++i) {
    const Link& l = links_[i];
    if (!l.parent) {
      if (root) throw ValidationError("multiple root links: '" + links_[*root].name + "' and '" + l.name + "'");
      root = i;
      continue;
    }
    auto it = std::find_if(links_.begin(), links_.end(), [&](const Link& o) { return o.name == *l.parent; });
    if (it == links_.end())
      throw ValidationError("link '" + l.name + "' references unknown parent '" + *l.parent + "'");
    parents_[i] = static_cast<int>(it - links_.begin());
  }

  // Every link must reach the root within n steps; otherwise its ancestry loops.
  for (std::size_t i = 0; i < n; ++i) {
    int cur = static_cast<int>(i);
    std::size_t steps = 0;
    while (cur >= 0 && steps <= n) {
      cur = parents_[cur];
      ++steps;
    }
    if (cur >= 0) throw ValidationError("cycle in link tree involving '" + links_[i].name + "'");
  }
  if (!root) throw ValidationError("cycle in link tree: no root link");
  root_ = *root;

  const Link& root_link = links_[root_];
  if (root_link.joint_type != JointType::Fixed)
    throw ValidationError("root link '" + root_link.name + "' must have a fixed joint");
  if (!root_link.origin_xyz.isZero(0.0) || !root_link.origin_rpy.isZero(0.0))
    throw ValidationError("root link '" + root_link.name + "' must have a zero origin");

  // Breadth-first order from the root; children keep document order.
  topo_order_.push_back(root_);
  for (std::size_t head = 0; head < topo_order_.size(); ++head)
    for (std::size_t i = 0; i < n; ++i)
      if (parents_[i] == static_cast<int>(topo_order_[head])) topo_order_.push_back(i);

  link_joint_.assign(n, std::nullopt);
  origins_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Link& l = links_[i];
    if (!(l.mass >= 0.0) || !std::isfinite(l.mass))
      throw ValidationError("link '" + l.name + "' has invalid mass");
    if (l.joint_type == JointType::Revolute) {
      if (!(l.limit_lower < l.limit_upper))
        throw ValidationError("link '" + l.name + "': revolute joint needs limit_lower < limit_upper");
      if (std::abs(l.axis.norm() - 1.0) > 1e-9)
        throw ValidationError("link '" + l.name + "': joint axis is not unit norm");
      link_joint_[i] = joint_links_.size();
      joint_links_.push_back(i);
    }
    if (l.contact) {
      if (l.sample_points.empty())
        throw ValidationError("contact link '" + l.name + "' has no sample points");
      contact_links_.push_back(i);
    }
    Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();
    origin.linear() = rpy_to_matrix(l.origin_rpy);
    origin.translation() = l.origin_xyz;
    origins_[i] = origin;
  }

  for (const auto& chain : fingers_) {
    if (chain.size() < 2) throw ValidationError("finger chain needs at least 2 links");
    std::vector<std::size_t> indices;
    for (const auto& link_name : chain) {
      auto idx = find_link(link_name);
      if (!idx) throw ValidationError("finger chain references unknown link '" + link_name + "'");
      if (!indices.empty() && parents_[*idx] != static_cast<int>(indices.back()))
        throw ValidationError("finger chain is not connected at '" + link_name + "'");
      indices.push_back(*idx);
    }
    finger_indices_.push_back(std::move(indices));
  }

  std::set<int> used;
  for (const auto& [link_name, human] : human_map_) {
    auto idx = find_link(link_name);
    if (!idx) throw ValidationError("human_map references unknown link '" + link_name + "'");
    if (human < 0 || human >= kHumanJointCount)
      throw ValidationError("human_map index out of range for '" + link_name + "'");
    if (!used.insert(human).second)
      throw ValidationError("human joint " + std::to_string(human) + " mapped more than once");
    mapped_.emplace_back(*idx, human);
  }
  std::sort(mapped_.begin(), mapped_.end());
}

std::optional<std::size_t> RobotHandModel::find_link(std::string_view name) const {
  for (std::size_t i = 0; i < links_.size(); ++i)
    if (links_[i].name == name) return i;
  return std::nullopt;
}

std::size_t RobotHandModel::link_index(std::string_view name) const {
  auto idx = find_link(name);
  if (!idx) throw ValidationError("unknown link '" + std::string(name) + "'");
  return *idx;
}

bool RobotHandModel::is_ancestor_or_self(std::size_t ancestor, std::size_t link) const {
  int cur = static_cast<int>(link);
  while (cur >= 0) {
    if (static_cast<std::size_t>(cur) == ancestor) return true;
    cur = parents_[cur];
  }
  return false;
}

std::optional<std::size_t> RobotHandModel::joint_of_link(std::size_t link) const {
  return link_joint_.at(link);
}

std::optional<std::size_t> RobotHandModel::link_for_human_joint(int human_joint) const {
  for (const auto& [link, human] : mapped_)
    if (human == human_joint) return link;
  return std::nullopt;
}

Eigen::VectorXd RobotHandModel::lower_limits() const {
  Eigen::VectorXd lo(dof());
  for (std::size_t j = 0; j < dof(); ++j) lo[j] = links_[joint_links_[j]].limit_lower;
  return lo;
}

Eigen::VectorXd RobotHandModel::upper_limits() const {
  Eigen::VectorXd hi(dof());
  for (std::size_t j = 0; j < dof(); ++j) hi[j] = links_[joint_links_[j]].limit_upper;
  return hi;
}

Eigen::VectorXd RobotHandModel::clamp_to_limits(const Eigen::VectorXd& q) const {
  return q.cwiseMax(lower_limits()).cwiseMin(upper_limits());
}

bool RobotHandModel::operator==(const RobotHandModel& other) const {
  return name_ == other.name_ && links_ == other.links_ && fingers_ == other.fingers_ &&
         human_map_ == other.human_map_;
}

// ---------------------------------------------------------------------------
// JSON document

namespace {

using detail::json;

Link parse_link(const json& j, std::size_t index) {
  const std::string ctx = "links[" + std::to_string(index) + "]";
  detail::require_keys_subset(j, {"name", "parent", "joint", "mass", "com", "sample_points", "contact"}, ctx);
  Link link;
  const json& name = detail::require(j, "name", ctx);
  if (!name.is_string()) throw ParseError(ctx + ".name: expected a string");
  link.name = name.get<std::string>();
  const std::string lctx = "link '" + link.name + "'";

  if (auto it = j.find("parent"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(lctx + ".parent: expected a string or null");
    link.parent = it->get<std::string>();
  }

  if (auto it = j.find("joint"); it != j.end()) {
    const json& jt = *it;
    const std::string jctx = lctx + ".joint";
    detail::require_keys_subset(jt, {"type", "axis", "origin_xyz", "origin_rpy", "limit_lower", "limit_upper"}, jctx);
    const json& type = detail::require(jt, "type", jctx);
    if (type == "revolute") {
      link.joint_type = JointType::Revolute;
    } else if (type == "fixed") {
      link.joint_type = JointType::Fixed;
    } else {
      throw ParseError(jctx + ".type: expected \"revolute\" or \"fixed\"");
    }
    if (jt.contains("axis")) link.axis = detail::read_vec3(jt["axis"], jctx + ".axis");
    if (jt.contains("origin_xyz")) link.origin_xyz = detail::read_vec3(jt["origin_xyz"], jctx + ".origin_xyz");
    if (jt.contains("origin_rpy")) link.origin_rpy = detail::read_vec3(jt["origin_rpy"], jctx + ".origin_rpy");
    const bool has_lo = jt.contains("limit_lower");
    const bool has_hi = jt.contains("limit_upper");
    if (link.joint_type == JointType::Revolute) {
      if (!jt.contains("axis")) throw ValidationError(jctx + ": revolute joint is missing its axis");
      if (!has_lo || !has_hi) throw ValidationError(jctx + ": revolute joint is missing a limit");
    }
    if (has_lo) link.limit_lower = detail::read_number(jt["limit_lower"], jctx + ".limit_lower");
    if (has_hi) link.limit_upper = detail::read_number(jt["limit_upper"], jctx + ".limit_upper");
  }

  if (j.contains("mass")) link.mass = detail::read_number(j["mass"], lctx + ".mass");
  if (j.contains("com")) link.com = detail::read_vec3(j["com"], lctx + ".com");
  if (auto it = j.find("sample_points"); it != j.end()) {
    if (!it->is_array()) throw ParseError(lctx + ".sample_points: expected an array");
    for (const auto& p : *it) link.sample_points.push_back(detail::read_vec3(p, lctx + ".sample_points"));
  }
  if (auto it = j.find("contact"); it != j.end()) {
    if (!it->is_boolean()) throw ParseError(lctx + ".contact: expected a boolean");
    link.contact = it->get<bool>();
  }
  return link;
}

}  // namespace

RobotHandModel parse_robot_description(std::string_view text) {
  const json doc = detail::parse_json(text, "robot description");
  detail::require_keys_subset(doc, {"name", "links", "fingers", "human_map"}, "robot description");

  const json& name = detail::require(doc, "name", "robot description");
  if (!name.is_string()) throw ParseError("robot description.name: expected a string");

  const json& links_json = detail::require(doc, "links", "robot description");
  if (!links_json.is_array()) throw ParseError("robot description.links: expected an array");
  std::vector<Link> links;
  for (std::size_t i = 0; i < links_json.size(); ++i) links.push_back(parse_link(links_json[i], i));

  std::vector<std::vector<std::string>> fingers;
  if (auto it = doc.find("fingers"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("robot description.fingers: expected an array");
    for (const auto& chain : *it) {
      if (!chain.is_array()) throw ParseError("robot description.fingers: expected arrays of link names");
      std::vector<std::string> names;
      for (const auto& n : chain) {
        if (!n.is_string()) throw ParseError("robot description.fingers: expected link names");
        names.push_back(n.get<std::string>());
      }
      fingers.push_back(std::move(names));
    }
  }

  std::map<std::string, int> human_map;
  if (auto it = doc.find("human_map"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("robot description.human_map: expected an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_number_integer())
        throw ParseError("robot description.human_map['" + key + "']: expected an integer");
      human_map[key] = value.get<int>();
    }
  }

  return RobotHandModel(name.get<std::string>(), std::move(links), std::move(fingers), std::move(human_map));
}

RobotHandModel load_robot_description(const std::filesystem::path& path) {
  return parse_robot_description(detail::read_text_file(path));
}

std::string serialize_robot_description(const RobotHandModel& model) {
  json links = json::array();
  for (const Link& l : model.links()) {
    json joint = {
        {"type", l.joint_type == JointType::Revolute ? "revolute" : "fixed"},
        {"axis", detail::write_vec3(l.axis)},
        {"origin_xyz", detail::write_vec3(l.origin_xyz)},
        {"origin_rpy", detail::write_vec3(l.origin_rpy)},
        {"limit_lower", l.limit_lower},
        {"limit_upper", l.limit_upper},
    };
    json samples = json::array();
    for (const auto& p : l.sample_points) samples.push_back(detail::write_vec3(p));
    links.push_back({
        {"name", l.name},
        {"parent", l.parent ? json(*l.parent) : json(nullptr)},
        {"joint", std::move(joint)},
        {"mass", l.mass},
        {"com", detail::write_vec3(l.com)},
        {"sample_points", std::move(samples)},
        {"contact", l.contact},
    });
  }
  json doc = {
      {"name", model.name()},
      {"links", std::move(links)},
      {"fingers", model.fingers()},
      {"human_map", model.human_map()},
  };
  return doc.dump(2) + "\n";
}

}  // namespace fungrasp
