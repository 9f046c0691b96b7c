#pragma once

#include <map>
#include <string>
#include <vector>

#include "mayerkit/model.hpp"
#include "mayerkit/quad.hpp"

namespace mayerkit::config {

// Minimal TOML subset: [section] headers, `key = value` lines, # comments.
// Values are numbers, "strings", booleans, or arrays of numbers.  Keys are
// flattened to "section.key".  Malformed input raises config_error with the
// line number.
struct Value {
  enum class Kind { number, string, boolean, array };
  Kind kind = Kind::number;
  double num = 0.0;
  std::string str;
  bool flag = false;
  std::vector<double> arr;
};

class Table {
 public:
  static Table parse_file(const std::string& path);
  static Table parse_string(const std::string& text);

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
  std::vector<double> array(const std::string& key) const;

  // Raw text per key, for echoing the configuration into reports.
  const std::map<std::string, std::string>& raw() const { return raw_; }

 private:
  const Value& at(const std::string& key) const;
  std::map<std::string, Value> values_;
  std::map<std::string, std::string> raw_;
};

// [model] dimension, potential = none | hard_sphere | tabulated_csv,
// exclusion_radius, beta, potential_csv.
model::PairPotential build_potential(const Table& t);

// [activity] z plus box_lower/box_upper arrays (constant activity).
model::Activity build_activity(const Table& t);

// [plan] seed, stream, samples, workers, tol.
quad::McPlan build_plan(const Table& t);

struct RunConfig {
  model::PairPotential potential;
  model::Activity activity;
  quad::McPlan plan;
  std::map<std::string, std::string> echo;
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_table(const Table& t);

}  // namespace mayerkit::config
