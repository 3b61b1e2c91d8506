#include "fungrasp/trajectory.hpp"

#include <sstream>

#include "fungrasp/error.hpp"
#include "json_util.hpp"

namespace fungrasp {

void JointTrajectory::validate() const {
  const std::size_t n = times.size();
  if (q_measured.size() != n || q_commanded.size() != n)
    throw ValidationError("trajectory arrays have different lengths");
  if (!object_poses.empty() && object_poses.size() != n)
    throw ValidationError("trajectory object poses do not cover every tick");
  if (!contact_flags.empty() && contact_flags.size() != n)
    throw ValidationError("trajectory contact flags do not cover every tick");
  if (!wrist_poses.empty() && wrist_poses.size() != n)
    throw ValidationError("trajectory wrist poses do not cover every tick");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) throw ValidationError("trajectory times must be strictly increasing");
    if (q_measured[i].size() != q_measured[0].size() || q_commanded[i].size() != q_measured[0].size())
      throw ValidationError("trajectory joint vectors change size");
    if (!contact_flags.empty() && contact_flags[i].size() != contact_flags[0].size())
      throw ValidationError("trajectory contact vectors change size");
  }
}

void JointTrajectory::push_back(double t, Eigen::VectorXd q, Eigen::VectorXd q_cmd) {
  times.push_back(t);
  q_measured.push_back(std::move(q));
  q_commanded.push_back(std::move(q_cmd));
}

namespace {

using detail::json;

Eigen::VectorXd read_vector(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = detail::read_number(j[i], ctx);
  return v;
}

json write_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

JointTrajectory parse_trajectory_jsonl(std::string_view text) {
  JointTrajectory traj;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = "trajectory line " + std::to_string(line_no);
    try {
      const json rec = detail::parse_json(line, ctx);
      detail::require_keys_subset(rec, {"t", "q", "q_cmd", "obj_pose", "contacts", "wrist_pose"}, ctx);
      const double t = detail::read_number(detail::require(rec, "t", ctx), ctx + ".t");
      Eigen::VectorXd q = read_vector(detail::require(rec, "q", ctx), ctx + ".q");
      Eigen::VectorXd q_cmd = read_vector(detail::require(rec, "q_cmd", ctx), ctx + ".q_cmd");
      const bool first = traj.empty();
      auto optional_field = [&](const char* key, bool have_so_far) {
        const bool present = rec.contains(key);
        if (!first && present != have_so_far)
          throw ParseError(ctx + ": \"" + key + "\" must appear on every line or on none");
        return present;
      };
      const bool has_obj = optional_field("obj_pose", traj.has_object_poses());
      const bool has_contacts = optional_field("contacts", traj.has_contacts());
      const bool has_wrist = optional_field("wrist_pose", traj.has_wrist_poses());
      traj.push_back(t, std::move(q), std::move(q_cmd));
      if (has_obj) traj.object_poses.push_back(detail::read_pose(rec["obj_pose"], ctx + ".obj_pose"));
      if (has_wrist) traj.wrist_poses.push_back(detail::read_pose(rec["wrist_pose"], ctx + ".wrist_pose"));
      if (has_contacts) {
        const json& c = rec["contacts"];
        if (!c.is_array()) throw ParseError(ctx + ".contacts: expected an array");
        std::vector<bool> flags;
        for (const auto& f : c) {
          if (f.is_boolean()) {
            flags.push_back(f.get<bool>());
          } else if (f.is_number_integer() && (f.get<int>() == 0 || f.get<int>() == 1)) {
            flags.push_back(f.get<int>() == 1);
          } else {
            throw ParseError(ctx + ".contacts: expected 0/1 flags");
          }
        }
        traj.contact_flags.push_back(std::move(flags));
      }
      const std::size_t last = traj.size() - 1;
      if (last > 0 && !(traj.times[last] > traj.times[last - 1]))
        throw ValidationError("times must be strictly increasing");
      if (traj.q_measured[last].size() != traj.q_measured[0].size() ||
          traj.q_commanded[last].size() != traj.q_measured[0].size())
        throw ValidationError("joint vectors must keep the same size");
      if (has_contacts && traj.contact_flags[last].size() != traj.contact_flags[0].size())
        throw ValidationError("contact vectors must keep the same size");
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(ctx + ": " + e.what());
    }
  }
  if (traj.empty()) throw ParseError("trajectory is empty");
  return traj;
}

JointTrajectory load_trajectory(const std::filesystem::path& path) {
  return parse_trajectory_jsonl(detail::read_text_file(path));
}

std::string serialize_trajectory_jsonl(const JointTrajectory& traj) {
  traj.validate();
  std::string out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    json rec = {{"t", traj.times[i]}, {"q", write_vector(traj.q_measured[i])}, {"q_cmd", write_vector(traj.q_commanded[i])}};
    if (traj.has_object_poses()) rec["obj_pose"] = detail::write_pose(traj.object_poses[i]);
    if (traj.has_contacts()) {
      json c = json::array();
      for (bool f : traj.contact_flags[i]) c.push_back(f ? 1 : 0);
      rec["contacts"] = c;
    }
    if (traj.has_wrist_poses()) rec["wrist_pose"] = detail::write_pose(traj.wrist_poses[i]);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

}  // namespace fungrasp
