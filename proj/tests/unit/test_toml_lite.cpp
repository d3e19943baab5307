// Copyright 2026 The qherald Authors
// SPDX-License-Identifier: Apache-2.0

#include "qherald/toml_lite.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <string>

#include "qherald/errors.hpp"

namespace qherald {
namespace {

TEST_CASE("scalar values parse with their natural types", "[toml]") {
  const auto j = parse_toml_lite(R"(
# a comment
count = 42
negative = -7
big = 1_000_000
rate = 0.25
on = true
off = false
name = "node a"
path = "a\\b \"q\" line\nend\ttab"
)");
  REQUIRE(j.at("count").get<std::int64_t>() == 42);
  REQUIRE(j.at("negative").get<std::int64_t>() == -7);
  REQUIRE(j.at("big").get<std::int64_t>() == 1000000);
  REQUIRE(j.at("rate").get<double>() == 0.25);
  REQUIRE(j.at("on").get<bool>() == true);
  REQUIRE(j.at("off").get<bool>() == false);
  REQUIRE(j.at("name").get<std::string>() == "node a");
  REQUIRE(j.at("path").get<std::string>() == "a\\b \"q\" line\nend\ttab");
}

TEST_CASE("table headers nest by dotted path", "[toml]") {
  const auto j = parse_toml_lite(R"(
top = 1

[node_a]
period_ns = 300 # trailing comment

[midpoint.fiber_a]
length_m = 25000
)");
  REQUIRE(j.at("top").get<int>() == 1);
  REQUIRE(j.at("node_a").at("period_ns").get<int>() == 300);
  REQUIRE(j.at("midpoint").at("fiber_a").at("length_m").get<int>() == 25000);
}

TEST_CASE("table arrays append one element per header", "[toml]") {
  const auto j = parse_toml_lite(R"(
[[node_a.attempts]]
cycle = 1
slot = 0

[[node_a.attempts]]
cycle = 2
slot = 1
)");
  const auto& arr = j.at("node_a").at("attempts");
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 2);
  REQUIRE(arr[0].at("cycle").get<int>() == 1);
  REQUIRE(arr[1].at("slot").get<int>() == 1);
}

TEST_CASE("inline arrays hold scalars", "[toml]") {
  const auto j = parse_toml_lite("ports = [1, 2, 3]\nempty = []\n");
  REQUIRE(j.at("ports").size() == 3);
  REQUIRE(j.at("ports")[2].get<int>() == 3);
  REQUIRE(j.at("empty").empty());
}

TEST_CASE("malformed documents report the line", "[toml]") {
  try {
    parse_toml_lite("a = 1\nb = \n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.line == 2);
    REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("duplicates are rejected", "[toml]") {
  REQUIRE_THROWS_AS(parse_toml_lite("a = 1\na = 2\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("[t]\nx = 1\n[t]\ny = 2\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("a = 1\n[[a]]\nx = 1\n"), ParseError);
}

TEST_CASE("syntax violations are rejected", "[toml]") {
  REQUIRE_THROWS_AS(parse_toml_lite("a 1\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("a = \"unterminated\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("a = 1 trailing\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("a = [1, 2\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("a = 1__2\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("a = \"bad \\q escape\"\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("[t\nx = 1\n"), ParseError);
  REQUIRE_THROWS_AS(parse_toml_lite("a = 99999999999999999999\n"), ParseError);
}

}  // namespace
}  // namespace qherald
