#include "mayerkit/config.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "mayerkit/errors.hpp"

namespace mayerkit::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw config_error("config line " + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) fail(line, "trailing characters after number");
    return v;
  } catch (const config_error&) {
    throw;
  } catch (...) {
    fail(line, "expected a number, got '" + s + "'");
  }
}

Value parse_value(const std::string& text, int line) {
  Value v;
  if (text.empty()) fail(line, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      fail(line, "unterminated string");
    v.kind = Value::Kind::string;
    v.str = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = Value::Kind::boolean;
    v.flag = text == "true";
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']') fail(line, "unterminated array");
    v.kind = Value::Kind::array;
    std::string body = text.substr(1, text.size() - 2);
    std::string item;
    std::stringstream ss(body);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(line, "empty array element");
      v.arr.push_back(parse_number(item, line));
    }
    return v;
  }
  v.kind = Value::Kind::number;
  v.num = parse_number(text, line);
  return v;
}

// Strips a # comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

}  // namespace

Table Table::parse_string(const std::string& text) {
  Table t;
  std::stringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (t.values_.count(full)) fail(lineno, "duplicate key '" + full + "'");
    t.values_[full] = parse_value(val, lineno);
    t.raw_[full] = val;
  }
  return t;
}

Table Table::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

const Value& Table::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    throw config_error("missing config key '" + key + "'");
  return it->second;
}

bool Table::has(const std::string& key) const { return values_.count(key); }

double Table::number(const std::string& key) const {
  const auto& v = at(key);
  if (v.kind != Value::Kind::number)
    throw config_error("config key '" + key + "' is not a number");
  return v.num;
}

double Table::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string Table::str(const std::string& key) const {
  const auto& v = at(key);
  if (v.kind != Value::Kind::string)
    throw config_error("config key '" + key + "' is not a string");
  return v.str;
}

std::string Table::str_or(const std::string& key,
                          const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

bool Table::bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (v.kind != Value::Kind::boolean)
    throw config_error("config key '" + key + "' is not a boolean");
  return v.flag;
}

std::vector<double> Table::array(const std::string& key) const {
  const auto& v = at(key);
  if (v.kind != Value::Kind::array)
    throw config_error("config key '" + key + "' is not an array");
  return v.arr;
}

model::PairPotential build_potential(const Table& t) {
  const std::string kind = t.str_or("model.potential", "none");
  const double beta = t.number_or("model.beta", 1.0);
  if (kind == "none") return model::PairPotential::none();
  if (kind == "hard_sphere")
    return model::PairPotential::hard_sphere(
        t.number("model.exclusion_radius"), beta);
  if (kind == "tabulated_csv")
    return model::PairPotential::tabulated_from_csv(t.str("model.potential_csv"),
                                                    beta);
  throw config_error("unknown potential kind '" + kind + "'");
}

model::Activity build_activity(const Table& t) {
  const auto lower = t.array("activity.box_lower");
  const auto upper = t.array("activity.box_upper");
  if (lower.size() != upper.size() || lower.empty() || lower.size() > 3)
    throw config_error("activity box arrays need matching size 1..3");
  const int dim = static_cast<int>(lower.size());
  const double want = t.number_or("model.dimension", dim);
  if (static_cast<int>(want) != dim)
    throw config_error("model.dimension disagrees with the activity box");
  model::Box box;
  box.dim = dim;
  for (int d = 0; d < dim; ++d) {
    box.lower[static_cast<std::size_t>(d)] = lower[static_cast<std::size_t>(d)];
    box.upper[static_cast<std::size_t>(d)] = upper[static_cast<std::size_t>(d)];
    if (!(lower[static_cast<std::size_t>(d)] <
          upper[static_cast<std::size_t>(d)]))
      throw config_error("activity box has empty extent");
  }
  const double z = t.number("activity.z");
  if (z < 0.0) throw config_error("activity.z must be non-negative");
  return model::Activity::constant(z, box);
}

quad::McPlan build_plan(const Table& t) {
  quad::McPlan plan;
  plan.seed = static_cast<std::uint64_t>(t.number_or("plan.seed",
                                                     static_cast<double>(plan.seed)));
  plan.stream = static_cast<std::uint64_t>(t.number_or("plan.stream", 0.0));
  plan.samples = static_cast<std::uint64_t>(
      t.number_or("plan.samples", static_cast<double>(plan.samples)));
  plan.workers = static_cast<int>(t.number_or("plan.workers", 1.0));
  plan.tol = t.number_or("plan.tol", plan.tol);
  if (plan.samples < 1) throw config_error("plan.samples must be positive");
  if (plan.workers < 1) throw config_error("plan.workers must be positive");
  if (!(plan.tol > 0.0)) throw config_error("plan.tol must be positive");
  return plan;
}

RunConfig run_config_from_table(const Table& t) {
  RunConfig rc{build_potential(t), build_activity(t), build_plan(t), t.raw()};
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_table(Table::parse_file(path));
}

}  // namespace mayerkit::config
