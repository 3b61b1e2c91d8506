#include <doctest.h>

#include <string>

#include "fixtures.hpp"
#include "fungrasp/error.hpp"
#include "fungrasp/hand_model.hpp"

using namespace fungrasp;

namespace {

std::string with_links(const std::string& links, const std::string& extra = "") {
  return R"({"name": "t", "links": [)" + links + "]" + extra + "}";
}

template <typename E>
std::string error_of(const std::string& text) {
  try {
    parse_robot_description(text);
  } catch (const E& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("hand_model") {
  TEST_CASE("wrist-only document has no joints") {
    const RobotHandModel m = parse_robot_description(with_links(R"({"name": "wrist"})"));
    CHECK(m.dof() == 0);
    CHECK(m.link_count() == 1);
    CHECK(m.root() == 0);
  }

  TEST_CASE("allegro-like fixture") {
    const RobotHandModel& m = fixtures::allegro();
    CHECK(m.dof() == 16);
    CHECK(m.finger_chains().size() == 4);
    CHECK(m.contact_links().size() == 4);
    CHECK(m.link_for_human_joint(8) == m.find_link("index_tip"));
    CHECK_FALSE(m.link_for_human_joint(20).has_value());
    for (const auto& link : m.links())
      if (link.joint_type == JointType::Revolute) CHECK(link.limit_lower < link.limit_upper);
  }

  TEST_CASE("parent cycle") {
    const std::string text = with_links(R"({"name": "w"},
      {"name": "a", "parent": "b", "joint": {"type": "fixed"}},
      {"name": "b", "parent": "a", "joint": {"type": "fixed"}})");
    CHECK(error_of<ValidationError>(text).find("cycle") != std::string::npos);
  }

  TEST_CASE("revolute joint without limits") {
    const std::string text = with_links(R"({"name": "w"},
      {"name": "a", "parent": "w", "joint": {"type": "revolute", "axis": [0, 0, 1], "limit_lower": -1}})");
    CHECK(error_of<ValidationError>(text).find("limit") != std::string::npos);
  }

  TEST_CASE("non-unit axis") {
    const std::string text = with_links(R"({"name": "w"},
      {"name": "a", "parent": "w", "joint": {"type": "revolute", "axis": [0, 0, 1.001],
       "limit_lower": -1, "limit_upper": 1}})");
    CHECK(error_of<ValidationError>(text).find("axis") != std::string::npos);
  }

  TEST_CASE("inverted limits") {
    const std::string text = with_links(R"({"name": "w"},
      {"name": "a", "parent": "w", "joint": {"type": "revolute", "axis": [0, 0, 1],
       "limit_lower": 1, "limit_upper": -1}})");
    CHECK_FALSE(error_of<ValidationError>(text).empty());
  }

  TEST_CASE("syntax errors carry a byte offset") {
    const std::string msg = error_of<ParseError>(R"({"name": "t", "links": [)");
    CHECK(msg.find("byte") != std::string::npos);
  }

  TEST_CASE("unknown keys are rejected") {
    CHECK_FALSE(error_of<ParseError>(with_links(R"({"name": "w", "colour": "red"})")).empty());
    CHECK_FALSE(error_of<ParseError>(with_links(R"({"name": "w"})", R"(, "extra": 1)")).empty());
  }

  TEST_CASE("other invariants") {
    // two roots
    CHECK_FALSE(error_of<ValidationError>(with_links(R"({"name": "w"}, {"name": "v"})")).empty());
    // duplicate human joint
    CHECK_FALSE(error_of<ValidationError>(with_links(R"({"name": "w"},
      {"name": "a", "parent": "w", "joint": {"type": "fixed"}})",
                                                      R"(, "human_map": {"w": 0, "a": 0})"))
                    .empty());
    // contact link without samples
    CHECK_FALSE(error_of<ValidationError>(with_links(R"({"name": "w", "contact": true})")).empty());
    // negative mass
    CHECK_FALSE(error_of<ValidationError>(with_links(R"({"name": "w", "mass": -1})")).empty());
    // broken finger chain
    CHECK_FALSE(error_of<ValidationError>(with_links(R"({"name": "w"},
      {"name": "a", "parent": "w", "joint": {"type": "fixed"}},
      {"name": "b", "parent": "w", "joint": {"type": "fixed"}})",
                                                      R"(, "fingers": [["a", "b"]])"))
                    .empty());
  }

  TEST_CASE("serialize round trip") {
    const RobotHandModel& m = fixtures::allegro();
    const RobotHandModel again = parse_robot_description(serialize_robot_description(m));
    CHECK(again == m);
    CHECK(serialize_robot_description(again) == serialize_robot_description(m));
  }

  TEST_CASE("limits and clamping") {
    const RobotHandModel& m = fixtures::allegro();
    const Eigen::VectorXd big = Eigen::VectorXd::Constant(16, 10.0);
    CHECK((m.clamp_to_limits(big) - m.upper_limits()).norm() == 0.0);
    CHECK(m.is_ancestor_or_self(m.root(), m.link_index("ring_tip")));
    CHECK_FALSE(m.is_ancestor_or_self(m.link_index("index_base"), m.link_index("ring_tip")));
    CHECK_THROWS_AS(m.link_index("nope"), ValidationError);
  }
}
