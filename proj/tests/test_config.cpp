#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "mayerkit/config.hpp"
#include "mayerkit/model.hpp"

using namespace mayerkit;

namespace {

constexpr const char* kSample = R"(# run description
[model]
potential = "hard_sphere"   # exclusion below
exclusion_radius = 0.5
beta = 2.0

[activity]
z = 0.25
box_lower = [0.0, 0.0]
box_upper = [4.0, 3.0]

[plan]
seed = 42
samples = 5000
workers = 2
tol = 1e-6
trace = false
note = "z # not a comment"
)";

bool throws_mentioning(const std::string& text, const std::string& needle) {
  try {
    config::Table::parse_string(text);
  } catch (const config_error& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("flattened keys, types and quote-aware comments") {
  const auto t = config::Table::parse_string(kSample);
  CHECK(t.str("model.potential") == "hard_sphere");
  CHECK(t.number("model.exclusion_radius") == 0.5);
  CHECK(t.number("plan.tol") == 1e-6);
  CHECK(t.bool_or("plan.trace", true) == false);
  CHECK(t.bool_or("plan.missing", true) == true);
  CHECK(t.str("plan.note") == "z # not a comment");
  const auto arr = t.array("activity.box_upper");
  REQUIRE(arr.size() == 2);
  CHECK(arr[0] == 4.0);
  CHECK(arr[1] == 3.0);
  CHECK(t.has("plan.seed"));
  CHECK(!t.has("plan.nope"));
  CHECK(t.number_or("plan.nope", 7.0) == 7.0);
  CHECK(t.str_or("plan.nope", "dflt") == "dflt");

  const auto& raw = t.raw();
  CHECK(raw.at("activity.z") == "0.25");
  CHECK(raw.at("model.potential") == "\"hard_sphere\"");

  // Type mismatches are named errors, not coercions.
  CHECK_THROWS_AS(t.number("model.potential"), config_error);
  CHECK_THROWS_AS(t.str("activity.z"), config_error);
  CHECK_THROWS_AS(t.array("plan.seed"), config_error);
  CHECK_THROWS_AS(t.number("no.such.key"), config_error);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(throws_mentioning("a = 1\nbroken line\n", "line 2"));
  CHECK(throws_mentioning("[sec\nk = 1\n", "line 1"));
  CHECK(throws_mentioning("k = \"open\n", "line 1"));
  CHECK(throws_mentioning("k = [1, , 2]\n", "empty array element"));
  CHECK(throws_mentioning("k = 1\nk = 2\n", "duplicate key 'k'"));
  CHECK(throws_mentioning("k = 12x\n", "line 1"));
  CHECK(throws_mentioning("[]\nk = 1\n", "empty section name"));
  CHECK(throws_mentioning(" = 3\n", "empty key"));
}

TEST_CASE("model and activity builders validate their tables") {
  const auto t = config::Table::parse_string(kSample);
  const auto pot = config::build_potential(t);
  CHECK(pot.is_hard_sphere());
  CHECK(pot.hard_sphere_radius() == 0.5);
  CHECK(pot.beta() == 2.0);

  const auto act = config::build_activity(t);
  CHECK(act.is_constant());
  CHECK(act.constant_z() == 0.25);
  CHECK(act.domain().dim == 2);
  CHECK(act.mass() == doctest::Approx(0.25 * 12.0));

  const auto plan = config::build_plan(t);
  CHECK(plan.seed == 42);
  CHECK(plan.samples == 5000);
  CHECK(plan.workers == 2);
  CHECK(plan.tol == 1e-6);

  CHECK_THROWS_AS(
      config::build_potential(config::Table::parse_string(
          "[model]\npotential = \"lennard\"\n")),
      config_error);
  CHECK_THROWS_AS(
      config::build_potential(config::Table::parse_string(
          "[model]\npotential = \"hard_sphere\"\n")),
      config_error);  // radius missing

  const char* flat =
      "[activity]\nz = 0.1\nbox_lower = [0.0]\nbox_upper = [0.0]\n";
  CHECK_THROWS_AS(config::build_activity(config::Table::parse_string(flat)),
                  config_error);
  const char* mismatch =
      "[model]\ndimension = 2\n[activity]\nz = 0.1\n"
      "box_lower = [0.0]\nbox_upper = [1.0]\n";
  CHECK_THROWS_AS(config::build_activity(config::Table::parse_string(mismatch)),
                  config_error);
  const char* negz =
      "[activity]\nz = -0.1\nbox_lower = [0.0]\nbox_upper = [1.0]\n";
  CHECK_THROWS_AS(config::build_activity(config::Table::parse_string(negz)),
                  config_error);
  CHECK_THROWS_AS(config::build_plan(config::Table::parse_string(
                      "[plan]\nsamples = 0\n")),
                  config_error);
  CHECK_THROWS_AS(config::build_plan(config::Table::parse_string(
                      "[plan]\ntol = 0.0\n")),
                  config_error);
}

TEST_CASE("run configs load from disk") {
  const std::string path = "mayerkit_test_run.toml";
  {
    std::ofstream f(path);
    f << kSample;
  }
  const auto rc = config::load_run_config(path);
  CHECK(rc.potential.is_hard_sphere());
  CHECK(rc.activity.constant_z() == 0.25);
  CHECK(rc.plan.seed == 42);
  CHECK(rc.echo.at("plan.samples") == "5000");
  std::remove(path.c_str());

  CHECK_THROWS_AS(config::load_run_config("no_such_file.toml"), config_error);
}
