#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fungrasp/error.hpp"
#include "fungrasp/pose.hpp"

namespace fungrasp::detail {

using nlohmann::json;

/// Parses text, converting nlohmann parse errors into ParseError with byte offset.
json parse_json(std::string_view text, std::string_view what);

/// Rejects keys outside `allowed`.
void require_keys_subset(const json& obj, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

const json& require(const json& obj, std::string_view key, std::string_view context);

double read_number(const json& value, std::string_view context);
Vec3 read_vec3(const json& value, std::string_view context);
json write_vec3(const Vec3& v);

Pose6D read_pose(const json& value, std::string_view context);
json write_pose(const Pose6D& pose);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace fungrasp::detail
