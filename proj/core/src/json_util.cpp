#include "json_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fungrasp::detail {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": syntax error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
}

void require_keys_subset(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context) {
  if (!obj.is_object()) throw ParseError(std::string(context) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ParseError(std::string(context) + ": unknown key \"" + key + "\"");
  }
}

const json& require(const json& obj, std::string_view key, std::string_view context) {
  auto it = obj.find(std::string(key));
  if (it == obj.end())
    throw ParseError(std::string(context) + ": missing key \"" + std::string(key) + "\"");
  return *it;
}

double read_number(const json& value, std::string_view context) {
  if (!value.is_number()) throw ParseError(std::string(context) + ": expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string(context) + ": non-finite number");
  return v;
}

Vec3 read_vec3(const json& value, std::string_view context) {
  if (!value.is_array() || value.size() != 3)
    throw ParseError(std::string(context) + ": expected an array of 3 numbers");
  return {read_number(value[0], context), read_number(value[1], context),
          read_number(value[2], context)};
}

json write_vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Pose6D read_pose(const json& value, std::string_view context) {
  require_keys_subset(value, {"position", "rotation"}, context);
  Pose6D pose;
  pose.position = read_vec3(require(value, "position", context), context);
  const json& r = require(value, "rotation", context);
  if (!r.is_array() || r.size() != 4)
    throw ParseError(std::string(context) + ": rotation must be [w,x,y,z]");
  pose.rotation = Eigen::Quaterniond(read_number(r[0], context), read_number(r[1], context),
                                     read_number(r[2], context), read_number(r[3], context));
  if (!pose.is_normalized())
    throw ValidationError(std::string(context) + ": rotation quaternion is not unit norm");
  return pose;
}

json write_pose(const Pose6D& pose) {
  const auto& q = pose.rotation;
  return json{{"position", write_vec3(pose.position)},
              {"rotation", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace fungrasp::detail
