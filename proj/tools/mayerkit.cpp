#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mayerkit/branching.hpp"
#include "mayerkit/combinat.hpp"
#include "mayerkit/config.hpp"
#include "mayerkit/converge.hpp"
#include "mayerkit/cumulants.hpp"
#include "mayerkit/errors.hpp"
#include "mayerkit/expansion.hpp"
#include "mayerkit/model.hpp"
#include "mayerkit/oracles.hpp"
#include "mayerkit/quad.hpp"
#include "mayerkit/ursell.hpp"
#include "mayerkit/verify.hpp"

using nlohmann::json;
using mayerkit::model::Point;

namespace {

bool log_enabled() {
  const char* v = std::getenv("MAYERKIT_LOG");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void logline(const std::string& s) {
  if (log_enabled()) std::fprintf(stderr, "[mayerkit] %s\n", s.c_str());
}

// ---------------------------------------------------------------------------
// Shared model/plan options.  A config file, when given, wins for the model
// and activity; explicitly passed plan flags always win.
// ---------------------------------------------------------------------------
struct ModelOpts {
  std::string config_path;
  std::string potential = "none";
  double radius = 1.0;
  double beta = 1.0;
  std::string potential_csv;
  double z = 1.0;
  std::vector<double> box = {0.0, 1.0};
  std::uint64_t seed = 0x5eedf00dULL;
  std::uint64_t stream = 0;
  std::uint64_t samples = 100000;
  int workers = 1;
  double tol = 1e-9;
};

void add_model_opts(CLI::App* cmd, ModelOpts& o) {
  cmd->add_option("--config", o.config_path, "run configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--potential", o.potential,
                  "none | hard_sphere | tabulated_csv");
  cmd->add_option("--radius", o.radius, "hard-sphere exclusion radius");
  cmd->add_option("--beta", o.beta, "inverse temperature multiplier");
  cmd->add_option("--potential-csv", o.potential_csv,
                  "csv with distance,value rows");
  cmd->add_option("--z", o.z, "constant activity");
  cmd->add_option("--box", o.box,
                  "domain box, lower coords then upper coords (2d values)")
      ->delimiter(',')
      ->expected(2, 6);
  cmd->add_option("--seed", o.seed, "rng seed");
  cmd->add_option("--stream", o.stream, "rng stream base");
  cmd->add_option("--samples", o.samples, "Monte Carlo samples per job");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--tol", o.tol, "series tail tolerance");
}

std::string fmtnum(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

mayerkit::config::RunConfig build_run(const ModelOpts& o, CLI::App* cmd) {
  auto make = [&o]() -> mayerkit::config::RunConfig {
    if (!o.config_path.empty()) {
      logline("loading config " + o.config_path);
      return mayerkit::config::load_run_config(o.config_path);
    }
    if (o.box.size() % 2 != 0)
      throw mayerkit::config_error(
          "--box needs an even count: lower coords then upper coords");
    const std::size_t d = o.box.size() / 2;
    std::ostringstream ss;
    ss << "[model]\n";
    ss << "potential = \"" << o.potential << "\"\n";
    ss << "exclusion_radius = " << fmtnum(o.radius) << "\n";
    ss << "beta = " << fmtnum(o.beta) << "\n";
    if (!o.potential_csv.empty())
      ss << "potential_csv = \"" << o.potential_csv << "\"\n";
    ss << "[activity]\n";
    ss << "z = " << fmtnum(o.z) << "\n";
    ss << "box_lower = [";
    for (std::size_t i = 0; i < d; ++i)
      ss << (i ? ", " : "") << fmtnum(o.box[i]);
    ss << "]\nbox_upper = [";
    for (std::size_t i = 0; i < d; ++i)
      ss << (i ? ", " : "") << fmtnum(o.box[d + i]);
    ss << "]\n";
    const auto t = mayerkit::config::Table::parse_string(ss.str());
    return mayerkit::config::RunConfig{mayerkit::config::build_potential(t),
                                       mayerkit::config::build_activity(t),
                                       mayerkit::quad::McPlan{}, t.raw()};
  };
  auto rc = make();
  // Plan flags override the file; defaults apply when neither is present.
  if (o.config_path.empty() || cmd->count("--seed")) rc.plan.seed = o.seed;
  if (o.config_path.empty() || cmd->count("--stream")) rc.plan.stream = o.stream;
  if (o.config_path.empty() || cmd->count("--samples"))
    rc.plan.samples = o.samples;
  if (o.config_path.empty() || cmd->count("--workers"))
    rc.plan.workers = o.workers;
  if (o.config_path.empty() || cmd->count("--tol")) rc.plan.tol = o.tol;
  rc.echo["plan.seed"] = std::to_string(rc.plan.seed);
  rc.echo["plan.stream"] = std::to_string(rc.plan.stream);
  rc.echo["plan.samples"] = std::to_string(rc.plan.samples);
  rc.echo["plan.workers"] = std::to_string(rc.plan.workers);
  rc.echo["plan.tol"] = fmtnum(rc.plan.tol);
  return rc;
}

std::vector<Point> parse_points(const std::string& s) {
  std::vector<Point> pts;
  std::stringstream tuples(s);
  std::string tuple;
  while (std::getline(tuples, tuple, ';')) {
    std::vector<double> c;
    std::stringstream coords(tuple);
    std::string item;
    while (std::getline(coords, item, ',')) {
      try {
        c.push_back(std::stod(item));
      } catch (...) {
        throw mayerkit::config_error("--points: bad coordinate '" + item + "'");
      }
    }
    if (c.size() == 1)
      pts.push_back(mayerkit::model::make_point({c[0]}));
    else if (c.size() == 2)
      pts.push_back(mayerkit::model::make_point({c[0], c[1]}));
    else if (c.size() == 3)
      pts.push_back(mayerkit::model::make_point({c[0], c[1], c[2]}));
    else
      throw mayerkit::config_error("--points: 1..3 coordinates per point");
  }
  if (pts.empty()) throw mayerkit::config_error("--points: empty list");
  for (const auto& p : pts)
    if (p.dim != pts.front().dim)
      throw mayerkit::config_error("--points: mixed dimensions");
  return pts;
}

json estimate_json(const mayerkit::quad::McEstimate& e) {
  return json{
      {"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples}};
}

json report_json(const mayerkit::expansion::ExpansionReport& r) {
  json orders = json::array();
  for (const auto& o : r.orders)
    orders.push_back(
        {{"order", o.order}, {"estimate", estimate_json(o.estimate)}});
  json j{{"orders", orders},
         {"truncation_order", r.truncation_order},
         {"partial_sum", r.partial_sum},
         {"std_error", r.std_error}};
  if (r.tail_bound) j["tail_bound"] = *r.tail_bound;
  return j;
}

json cert_json(const mayerkit::converge::ConvergenceCertificate& c) {
  const char* cond = c.condition == mayerkit::converge::Condition::kpu
                         ? "kpu"
                         : (c.condition == mayerkit::converge::Condition::fp
                                ? "fp"
                                : "py");
  return json{{"condition", cond},   {"a", c.a},
              {"t", c.t},            {"lhs", c.lhs},
              {"rhs", c.rhs},        {"margin", c.margin},
              {"satisfied", c.satisfied}, {"kmax_used", c.kmax_used},
              {"samples", c.samples}};
}

json cumulant_json(const mayerkit::cumulants::CumulantReport& r) {
  json per_n = json::array();
  for (const auto& t : r.per_n)
    per_n.push_back({{"n", t.n}, {"estimate", estimate_json(t.estimate)}});
  return json{{"m", r.m},
              {"form", r.form == mayerkit::cumulants::Form::multigraph
                           ? "multigraph"
                           : "partition_pairs"},
              {"connected", r.connected},
              {"per_n", per_n},
              {"value", r.value},
              {"std_error", r.std_error}};
}

json base_report(const std::string& command) {
  return json{{"schema_version", 1}, {"command", command}};
}

void attach_config(json& j, const mayerkit::config::RunConfig& rc) {
  j["config"] = json(rc.echo);
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw mayerkit::config_error("cannot write " + out_path);
    f << j.dump(2) << "\n";
    logline("report written to " + out_path);
  }
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------
std::string graph_edges(const mayerkit::combinat::Graph& g) {
  std::string s;
  for (int j = 1; j < g.n; ++j)
    for (int i = 0; i < j; ++i)
      if (g.has_edge(i, j))
        s += "(" + std::to_string(i) + "," + std::to_string(j) + ")";
  return s.empty() ? "()" : s;
}

std::string partition_blocks(const mayerkit::combinat::SetPartition& p) {
  std::string s;
  for (const auto& b : p.blocks()) {
    s += "{";
    for (std::size_t i = 0; i < b.size(); ++i)
      s += (i ? " " : "") + std::to_string(b[i]);
    s += "}";
  }
  return s;
}

int run_enumerate(const std::string& family, int n, int k, int m,
                  std::uint64_t limit, bool force, const std::string& out) {
  namespace cb = mayerkit::combinat;
  std::uint64_t count = 0;
  std::vector<std::string> items;
  auto keep = [&](const std::string& s) {
    if (count <= limit && limit > 0) items.push_back(s);
  };
  if (family == "graphs") {
    cb::GraphRange r(n, force);
    while (auto g = r.next()) ++count, keep(graph_edges(*g));
  } else if (family == "connected") {
    cb::ConnectedGraphRange r(n, force);
    while (auto g = r.next()) ++count, keep(graph_edges(*g));
  } else if (family == "multirooted") {
    cb::MultirootedGraphRange r(k, n, force);
    while (auto g = r.next()) ++count, keep(graph_edges(*g));
  } else if (family == "trees") {
    cb::TreeRange r(n, false, force);
    while (auto t = r.next()) ++count, keep(graph_edges(t->graph));
  } else if (family == "rooted-trees") {
    cb::TreeRange r(n, true, force);
    while (auto t = r.next())
      ++count, keep("root " + std::to_string(t->root) + " " +
                    graph_edges(t->graph));
  } else if (family == "multigraphs" || family == "connected-multigraphs") {
    cb::MultigraphRange r(n, m,
                          family == "multigraphs"
                              ? cb::MultigraphMode::spanning
                              : cb::MultigraphMode::connected,
                          force);
    while (auto g = r.next()) {
      ++count;
      std::string s;
      for (int a = 0; a < g->m; ++a) {
        auto [i, j] = cb::pair_from_index(g->assignment[static_cast<std::size_t>(a)]);
        s += "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
      keep(s);
    }
  } else if (family == "partitions") {
    cb::PartitionRange r(n, force);
    while (auto p = r.next()) ++count, keep(partition_blocks(*p));
  } else if (family == "pair-partitions") {
    cb::NonflatConnectedPairRange r(m, force);
    while (auto p = r.next()) ++count, keep(partition_blocks(*p));
  } else {
    throw mayerkit::config_error("unknown family: " + family);
  }
  json j = base_report("enumerate");
  j["family"] = family;
  if (family != "pair-partitions") j["n"] = n;
  if (family == "multirooted") j["k"] = k;
  if (family.find("multigraph") != std::string::npos ||
      family == "pair-partitions")
    j["m"] = m;
  j["count"] = count;
  if (!items.empty()) j["items"] = items;
  emit(j, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cluster expansions for repulsive gases"};
  app.require_subcommand(1);

  // ---- enumerate ----
  auto* cmd_enum = app.add_subcommand("enumerate", "count or list graph families");
  std::string en_family;
  int en_n = 3, en_k = 1, en_m = 1;
  std::uint64_t en_limit = 0;
  bool en_force = false;
  std::string en_out;
  cmd_enum->add_option("--family", en_family,
                       "graphs | connected | multirooted | trees | "
                       "rooted-trees | multigraphs | connected-multigraphs | "
                       "partitions | pair-partitions")
      ->required();
  cmd_enum->add_option("--n", en_n, "vertex / element count");
  cmd_enum->add_option("--k", en_k, "root count (multirooted)");
  cmd_enum->add_option("--m", en_m, "edge labels (multigraphs, pair-partitions)");
  cmd_enum->add_option("--limit", en_limit, "list at most this many items");
  cmd_enum->add_flag("--force-size-limits", en_force,
                     "opt into enumerations beyond the default window");
  cmd_enum->add_option("--out", en_out, "write the JSON report here");

  // ---- ursell ----
  auto* cmd_urs = app.add_subcommand("ursell", "connected and rooted graph sums");
  ModelOpts urs_o;
  add_model_opts(cmd_urs, urs_o);
  std::string urs_points, urs_out;
  int urs_k = 0;
  cmd_urs->add_option("--points", urs_points,
                      "tuple, e.g. \"0.0;0.8;1.4\" (coords comma-separated)")
      ->required();
  cmd_urs->add_option("--k", urs_k, "root count (0 = connected sum)");
  cmd_urs->add_option("--out", urs_out, "write the JSON report here");

  // ---- expand ----
  auto* cmd_exp = app.add_subcommand("expand", "activity expansions");
  ModelOpts exp_o;
  add_model_opts(cmd_exp, exp_o);
  std::string exp_quantity = "logXi", exp_points, exp_out;
  int exp_order = 3;
  double exp_wa = 0.0, exp_wt = 0.0, exp_hval = 0.1;
  std::vector<double> exp_region, exp_hbox;
  cmd_exp->add_option("--quantity", exp_quantity,
                      "logXi | rho | rhoT | logLaplace | janossy");
  cmd_exp->add_option("--order", exp_order,
                      "integration orders (janossy: total point budget)");
  cmd_exp->add_option("--points", exp_points, "fixed tuple (rho, rhoT, janossy)");
  cmd_exp->add_option("--witness-a", exp_wa, "certificate parameter a");
  cmd_exp->add_option("--witness-t", exp_wt,
                      "certificate slack t (> 0 adds a tail bound)");
  cmd_exp->add_option("--region", exp_region,
                      "janossy region, lower then upper coords")
      ->delimiter(',')
      ->expected(2, 6);
  cmd_exp->add_option("--h-box", exp_hbox,
                      "logLaplace: test function support box")
      ->delimiter(',')
      ->expected(2, 6);
  cmd_exp->add_option("--h-value", exp_hval,
                      "logLaplace: test function value on its box");
  cmd_exp->add_option("--out", exp_out, "write the JSON report here");

  // ---- converge ----
  auto* cmd_con = app.add_subcommand("converge", "sufficient conditions and trees");
  ModelOpts con_o;
  add_model_opts(cmd_con, con_o);
  std::string con_cond = "kpu", con_tree, con_out;
  double con_a = -1.0, con_t = 0.0, con_uconst = 0.0, con_B = 0.0;
  int con_kmax = 0, con_dim = 0, con_series = 0, con_fk = 0, con_fn = 0;
  bool con_critical = false;
  cmd_con->add_option("--condition", con_cond, "kpu | fp | py");
  cmd_con->add_option("--a", con_a, "check this a (otherwise optimize)");
  cmd_con->add_option("--t", con_t, "exponential slack");
  cmd_con->add_option("--kmax", con_kmax, "pinned integral orders (fp)");
  cmd_con->add_flag("--critical", con_critical,
                    "bisect for the largest feasible activity");
  cmd_con->add_option("--dim", con_dim, "dimension for --critical");
  cmd_con->add_option("--tree", con_tree, "fixed point of plain | fp tree map");
  cmd_con->add_option("--tree-series", con_series, "tree series coefficients");
  cmd_con->add_option("--forest-k", con_fk, "forest partial sum roots");
  cmd_con->add_option("--forest-order", con_fn, "forest partial sum order");
  cmd_con->add_option("--kernel-const", con_uconst,
                      "py: constant kernel value");
  cmd_con->add_option("--B-const", con_B, "py: constant B");
  cmd_con->add_option("--out", con_out, "write the JSON report here");

  // ---- branching ----
  auto* cmd_bra = app.add_subcommand("branching", "offspring-dominated growth laws");
  ModelOpts bra_o;
  add_model_opts(cmd_bra, bra_o);
  std::string bra_ext, bra_out;
  double bra_mu = -1.0;
  bool bra_from_model = false, bra_mass = false;
  int bra_pmf = 0, bra_cdf = 0, bra_gf = 0;
  cmd_bra->add_option("--mu", bra_mu, "offspring mean");
  cmd_bra->add_flag("--from-model", bra_from_model,
                    "derive mu = z * b from the model");
  cmd_bra->add_flag("--mass", bra_mass, "total progeny mass (mu <= 1)");
  cmd_bra->add_option("--pmf", bra_pmf, "progeny pmf values 1..N");
  cmd_bra->add_option("--cdf", bra_cdf, "progeny cdf values 1..N");
  cmd_bra->add_option("--progeny-gf", bra_gf,
                      "partial sums of the progeny series up to N");
  cmd_bra->add_option("--extinction", bra_ext, "fixed_point | simulation");
  cmd_bra->add_option("--out", bra_out, "write the JSON report here");

  // ---- rcm ----
  auto* cmd_rcm = app.add_subcommand("rcm", "random connection model clusters");
  ModelOpts rcm_o;
  add_model_opts(cmd_rcm, rcm_o);
  std::string rcm_q, rcm_out;
  std::uint64_t rcm_trials = 1000, rcm_cap = 10000;
  cmd_rcm->add_option("--q", rcm_q, "pin location (default: domain center)");
  cmd_rcm->add_option("--trials", rcm_trials, "independent clusters");
  cmd_rcm->add_option("--cap", rcm_cap, "size cap per cluster");
  cmd_rcm->add_option("--out", rcm_out, "write the JSON report here");

  // ---- cumulants ----
  auto* cmd_cum = app.add_subcommand("cumulants", "pair statistic cumulants");
  ModelOpts cum_o;
  add_model_opts(cmd_cum, cum_o);
  std::string cum_form = "multigraph", cum_table, cum_out;
  int cum_m = 2;
  double cum_const = 1.0, cum_scale = 1.0;
  bool cum_moment = false, cum_empirical = false;
  cmd_cum->add_option("--m", cum_m, "cumulant order (<= 4)");
  cmd_cum->add_option("--form", cum_form, "multigraph | partition_pairs");
  cmd_cum->add_flag("--moment", cum_moment, "raw moment (multigraph form)");
  cmd_cum->add_flag("--empirical", cum_empirical,
                    "sampled k-statistics with jackknife errors");
  cmd_cum->add_option("--kernel-const", cum_const, "constant kernel value");
  cmd_cum->add_option("--kernel-table", cum_table,
                      "radial kernel \"d0,d1,..:v0,v1,..\"");
  cmd_cum->add_option("--kernel-scale", cum_scale, "kernel multiplier");
  cmd_cum->add_option("--out", cum_out, "write the JSON report here");

  // ---- oracle ----
  auto* cmd_ora = app.add_subcommand("oracle", "reference values");
  ModelOpts ora_o;
  add_model_opts(cmd_ora, ora_o);
  std::string ora_name, ora_points, ora_out;
  double ora_sigma = 1.0, ora_L = 10.0, ora_lambda = 1.0;
  int ora_nmax = 6, ora_m = 2;
  cmd_ora->add_option("--name", ora_name,
                      "tonks | xi | rho | pair-cumulants")
      ->required();
  cmd_ora->add_option("--sigma", ora_sigma, "tonks: rod exclusion distance");
  cmd_ora->add_option("--L", ora_L, "tonks: segment length");
  cmd_ora->add_option("--nmax", ora_nmax, "xi / rho: truncation order");
  cmd_ora->add_option("--points", ora_points, "rho: fixed tuple");
  cmd_ora->add_option("--lambda", ora_lambda, "pair-cumulants: Poisson mean");
  cmd_ora->add_option("--m", ora_m, "pair-cumulants: orders 1..m");
  cmd_ora->add_option("--out", ora_out, "write the JSON report here");

  // ---- verify ----
  auto* cmd_ver = app.add_subcommand("verify", "acceptance criteria");
  std::string ver_suite = "all", ver_out;
  int ver_workers = 4;
  cmd_ver->add_option("suite", ver_suite,
                      "counts | thresholds | oracles | cumulants | branching "
                      "| invariants | all");
  cmd_ver->add_option("--workers", ver_workers, "worker threads");
  cmd_ver->add_option("--out", ver_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_enum->parsed())
      return run_enumerate(en_family, en_n, en_k, en_m, en_limit, en_force,
                           en_out);

    if (cmd_urs->parsed()) {
      const auto rc = build_run(urs_o, cmd_urs);
      const auto pts = parse_points(urs_points);
      json j = base_report("ursell");
      attach_config(j, rc);
      if (urs_k <= 0) {
        const auto w = mayerkit::ursell::ursell(rc.potential, pts);
        j["value"] = w.value;
        j["terms"] = w.terms;
        j["n"] = w.n;
      } else {
        const auto w = mayerkit::ursell::psi(rc.potential, urs_k, pts);
        j["value"] = w.value;
        j["terms"] = w.terms;
        j["n"] = w.n;
        j["k"] = urs_k;
        j["by_recursion"] =
            mayerkit::ursell::psi_by_recursion(rc.potential, urs_k, pts);
      }
      emit(j, urs_out);
      return 0;
    }

    if (cmd_exp->parsed()) {
      const auto rc = build_run(exp_o, cmd_exp);
      std::optional<mayerkit::expansion::TailWitness> witness;
      if (cmd_exp->count("--witness-a") || cmd_exp->count("--witness-t"))
        witness = mayerkit::expansion::TailWitness{exp_wa, exp_wt};
      json j = base_report("expand");
      attach_config(j, rc);
      j["quantity"] = exp_quantity;
      logline("expand " + exp_quantity + " to order " +
              std::to_string(exp_order));
      if (exp_quantity == "logXi") {
        j["report"] = report_json(mayerkit::expansion::log_partition_expansion(
            rc.potential, rc.activity, exp_order, rc.plan, witness));
      } else if (exp_quantity == "rho" || exp_quantity == "rhoT") {
        if (exp_points.empty())
          throw mayerkit::config_error(exp_quantity + " needs --points");
        const auto pts = parse_points(exp_points);
        j["report"] = report_json(
            exp_quantity == "rho"
                ? mayerkit::expansion::correlation_expansion(
                      rc.potential, rc.activity, pts, exp_order, rc.plan)
                : mayerkit::expansion::truncated_expansion(
                      rc.potential, rc.activity, pts, exp_order, rc.plan));
      } else if (exp_quantity == "logLaplace") {
        auto hbox = rc.activity.domain();
        if (!exp_hbox.empty()) {
          if (exp_hbox.size() != 2 * static_cast<std::size_t>(hbox.dim))
            throw mayerkit::config_error("--h-box size must match the domain");
          for (int i = 0; i < hbox.dim; ++i) {
            hbox.lower[static_cast<std::size_t>(i)] = exp_hbox[static_cast<std::size_t>(i)];
            hbox.upper[static_cast<std::size_t>(i)] =
                exp_hbox[static_cast<std::size_t>(hbox.dim + i)];
          }
        }
        const double hv = exp_hval;
        auto h = [hbox, hv](const Point& p) {
          return hbox.contains(p) ? hv : 0.0;
        };
        j["report"] = report_json(mayerkit::expansion::log_laplace_expansion(
            rc.potential, rc.activity, h, exp_order, rc.plan, witness));
      } else if (exp_quantity == "janossy") {
        if (exp_points.empty())
          throw mayerkit::config_error("janossy needs --points");
        const auto pts = parse_points(exp_points);
        auto region = rc.activity.domain();
        if (!exp_region.empty()) {
          if (exp_region.size() != 2 * static_cast<std::size_t>(region.dim))
            throw mayerkit::config_error("--region size must match the domain");
          for (int i = 0; i < region.dim; ++i) {
            region.lower[static_cast<std::size_t>(i)] =
                exp_region[static_cast<std::size_t>(i)];
            region.upper[static_cast<std::size_t>(i)] =
                exp_region[static_cast<std::size_t>(region.dim + i)];
          }
        }
        j["estimate"] = estimate_json(mayerkit::expansion::janossy_from_correlations(
            rc.potential, rc.activity, region, pts, exp_order, rc.plan));
      } else {
        throw mayerkit::config_error("unknown quantity: " + exp_quantity);
      }
      emit(j, exp_out);
      return 0;
    }

    if (cmd_con->parsed()) {
      const auto rc = build_run(con_o, cmd_con);
      json j = base_report("converge");
      attach_config(j, rc);
      namespace cv = mayerkit::converge;
      cv::Condition cond;
      if (con_cond == "kpu")
        cond = cv::Condition::kpu;
      else if (con_cond == "fp")
        cond = cv::Condition::fp;
      else if (con_cond == "py")
        cond = cv::Condition::py;
      else
        throw mayerkit::config_error("unknown condition: " + con_cond);

      if (con_critical) {
        const int dim = con_dim > 0 ? con_dim : rc.activity.domain().dim;
        const double zc = cv::critical_activity(rc.potential, dim, cond,
                                                con_t, con_kmax, rc.plan);
        j["critical_activity"] = zc;
        j["dim"] = dim;
      } else if (!con_tree.empty()) {
        const auto variant = con_tree == "plain" ? cv::TreeVariant::plain
                             : con_tree == "fp"
                                 ? cv::TreeVariant::fp
                                 : throw mayerkit::config_error(
                                       "unknown tree variant: " + con_tree);
        const auto gf = cv::tree_gf(rc.potential, rc.activity, variant, rc.plan);
        j["tree"] = {{"value", gf.value},
                     {"diverged", gf.diverged},
                     {"iterations", gf.iterations}};
      } else if (con_series > 0) {
        j["tree_series"] =
            cv::tree_series(rc.potential, rc.activity, con_series, rc.plan);
      } else if (con_fk > 0) {
        j["forest_partial_sum"] = cv::forest_picard(
            rc.potential, rc.activity, con_fk,
            con_fn > 0 ? con_fn : con_fk + 3, rc.plan);
      } else if (cond == cv::Condition::py) {
        if (con_a < 0.0)
          throw mayerkit::config_error("py needs --a (no witness search)");
        const auto u = mayerkit::model::Kernel::constant(con_uconst);
        const double B = con_B;
        const auto cert = cv::check_py(
            u, rc.activity, [B](const Point&) { return B; }, con_a, rc.plan);
        j["certificate"] = cert_json(cert);
      } else if (con_a >= 0.0) {
        const auto cert =
            cond == cv::Condition::kpu
                ? cv::check_kpu(rc.potential, rc.activity, con_a, con_t, rc.plan)
                : cv::check_fp(rc.potential, rc.activity, con_a, con_t,
                               con_kmax, rc.plan);
        j["certificate"] = cert_json(cert);
      } else {
        const auto cert = cv::optimize_witness(rc.potential, rc.activity, cond,
                                               con_t, con_kmax, rc.plan);
        j["certificate"] = cert_json(cert);
      }
      emit(j, con_out);
      return 0;
    }

    if (cmd_bra->parsed()) {
      const auto rc = build_run(bra_o, cmd_bra);
      json j = base_report("branching");
      attach_config(j, rc);
      namespace br = mayerkit::branching;
      br::BranchingSpec spec;
      if (bra_from_model) {
        spec = br::from_model(rc.potential, rc.activity, rc.plan);
      } else {
        if (bra_mu < 0.0)
          throw mayerkit::config_error("branching needs --mu or --from-model");
        spec.mu = bra_mu;
      }
      j["spec"] = {{"z", spec.z}, {"b", spec.b}, {"mu", spec.mu}};
      if (bra_mass) j["total_mass"] = br::borel_total_mass(spec.mu);
      if (bra_pmf > 0) {
        std::vector<double> pmf;
        for (int n = 1; n <= bra_pmf; ++n)
          pmf.push_back(br::borel_pmf(spec.mu, static_cast<std::uint64_t>(n)));
        j["pmf"] = pmf;
      }
      if (bra_cdf > 0)
        j["cdf"] = br::borel_cdf_table(spec.mu,
                                       static_cast<std::uint64_t>(bra_cdf));
      if (bra_gf > 0) {
        const auto gf = br::total_progeny_gf(spec.mu, bra_gf);
        j["progeny_gf"] = {{"value", gf.value},
                           {"diverged", gf.diverged},
                           {"terms", gf.terms}};
      }
      if (!bra_ext.empty()) {
        const auto method = bra_ext == "fixed_point"
                                ? br::ExtinctionMethod::fixed_point
                                : bra_ext == "simulation"
                                      ? br::ExtinctionMethod::simulation
                                      : throw mayerkit::config_error(
                                            "unknown extinction method: " +
                                            bra_ext);
        j["extinction"] =
            estimate_json(br::extinction_probability(spec, method, rc.plan));
      }
      emit(j, bra_out);
      return 0;
    }

    if (cmd_rcm->parsed()) {
      const auto rc = build_run(rcm_o, cmd_rcm);
      const Point q = rcm_q.empty() ? rc.activity.domain().center()
                                    : parse_points(rcm_q).front();
      logline("growing " + std::to_string(rcm_trials) + " clusters");
      const auto rep = mayerkit::branching::rcm_cluster(
          rc.potential, rc.activity, q, rcm_trials, rcm_cap, rc.plan);
      json j = base_report("rcm");
      attach_config(j, rc);
      j["trials"] = rcm_trials;
      j["cap"] = rep.cap;
      j["cap_fraction"] = rep.cap_fraction;
      double mean = 0.0;
      std::map<std::uint64_t, std::uint64_t> hist;
      for (auto s : rep.sizes) {
        mean += static_cast<double>(s);
        ++hist[s];
      }
      j["mean_size"] = mean / static_cast<double>(rep.sizes.size());
      json jh = json::object();
      for (const auto& [size, cnt] : hist) jh[std::to_string(size)] = cnt;
      j["size_histogram"] = jh;
      emit(j, rcm_out);
      return 0;
    }

    if (cmd_cum->parsed()) {
      const auto rc = build_run(cum_o, cmd_cum);
      auto u = mayerkit::model::Kernel::constant(cum_const);
      if (!cum_table.empty()) {
        const auto colon = cum_table.find(':');
        if (colon == std::string::npos)
          throw mayerkit::config_error("--kernel-table wants \"dists:values\"");
        auto nums = [](const std::string& s) {
          std::vector<double> v;
          std::stringstream ss(s);
          std::string item;
          while (std::getline(ss, item, ','))
            try {
              v.push_back(std::stod(item));
            } catch (...) {
              throw mayerkit::config_error("--kernel-table: bad number '" +
                                           item + "'");
            }
          return v;
        };
        u = mayerkit::model::Kernel::tabulated(nums(cum_table.substr(0, colon)),
                                               nums(cum_table.substr(colon + 1)),
                                               cum_scale);
      }
      json j = base_report("cumulants");
      attach_config(j, rc);
      namespace cm = mayerkit::cumulants;
      if (cum_empirical) {
        const auto emp = cm::empirical_cumulants(u, rc.activity, cum_m, rc.plan);
        j["empirical"] = {{"k", emp.k},
                          {"std_error", emp.std_error},
                          {"trials", emp.trials}};
      } else if (cum_moment) {
        j["report"] =
            cumulant_json(cm::moment_multigraph(u, rc.activity, cum_m, rc.plan));
      } else if (cum_form == "multigraph") {
        j["report"] = cumulant_json(
            cm::cumulant_multigraph(u, rc.activity, cum_m, rc.plan));
      } else if (cum_form == "partition_pairs") {
        j["report"] = cumulant_json(
            cm::cumulant_partition_pairs(u, rc.activity, cum_m, rc.plan));
      } else {
        throw mayerkit::config_error("unknown form: " + cum_form);
      }
      emit(j, cum_out);
      return 0;
    }

    if (cmd_ora->parsed()) {
      const auto rc = build_run(ora_o, cmd_ora);
      json j = base_report("oracle");
      j["name"] = ora_name;
      if (ora_name == "tonks") {
        j["log_xi"] =
            mayerkit::oracles::tonks_log_xi(ora_o.z, ora_sigma, ora_L);
      } else if (ora_name == "xi") {
        attach_config(j, rc);
        j["estimate"] = estimate_json(mayerkit::expansion::xi_bruteforce(
            rc.potential, rc.activity, ora_nmax, rc.plan));
      } else if (ora_name == "rho") {
        if (ora_points.empty())
          throw mayerkit::config_error("oracle rho needs --points");
        attach_config(j, rc);
        j["estimate"] = estimate_json(mayerkit::expansion::rho_bruteforce(
            rc.potential, rc.activity, parse_points(ora_points), ora_nmax,
            rc.plan));
      } else if (ora_name == "pair-cumulants") {
        j["cumulants"] =
            mayerkit::oracles::pair_count_cumulants(ora_lambda, ora_m);
      } else {
        throw mayerkit::config_error("unknown oracle: " + ora_name);
      }
      emit(j, ora_out);
      return 0;
    }

    if (cmd_ver->parsed()) {
      logline("verify suite " + ver_suite);
      const auto suite = mayerkit::verify::run_suite(ver_suite, ver_workers);
      if (!ver_out.empty()) {
        json j = base_report("verify");
        j["suite"] = ver_suite;
        j["all_passed"] = suite.all_passed;
        json arr = json::array();
        for (const auto& r : suite.results)
          arr.push_back({{"id", r.id},
                         {"name", r.name},
                         {"passed", r.passed},
                         {"seconds", r.seconds},
                         {"details", r.details}});
        j["criteria"] = arr;
        emit(j, ver_out);
      }
      return suite.all_passed ? 0 : 1;
    }
  } catch (const mayerkit::size_limit_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const mayerkit::tail_too_large_error& e) {
    std::fprintf(stderr, "error: %s (nmax >= %d would suffice)\n", e.what(),
                 e.required_nmax);
    return 4;
  } catch (const mayerkit::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
