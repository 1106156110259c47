// tailbound: certified tail-probability bounds for bounded martingale sums.
//
// Subcommands: bound, table, transform, simulate, verify.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tailbounds/bounds.hpp"
#include "tailbounds/report_io.hpp"
#include "tailbounds/simulate.hpp"

namespace tb = tailbounds;
using nlohmann::json;

namespace {

struct ConstraintFlags {
  int n = 0;
  std::optional<double> sigma2, skew, kurt;
  std::string file;
};

void add_constraint_flags(CLI::App* cmd, ConstraintFlags& cf, bool need_n = true) {
  auto* n_opt = cmd->add_option("--n", cf.n, "number of summands");
  if (need_n) n_opt->check(CLI::PositiveNumber);
  cmd->add_option("--sigma2", cf.sigma2, "variance cap applied to every summand");
  cmd->add_option("--skew", cf.skew, "skewness floor applied to every summand");
  cmd->add_option("--kurt", cf.kurt, "kurtosis cap applied to every summand");
  cmd->add_option("--constraints", cf.file, "json file with per-summand arrays");
}

tb::MomentConstraints make_constraints(const ConstraintFlags& cf) {
  tb::MomentConstraints mc;
  if (!cf.file.empty()) {
    std::ifstream in(cf.file);
    if (!in) throw std::domain_error("cannot open constraints file: " + cf.file);
    json j = json::parse(in);
    mc.n = j.at("n").get<int>();
    auto read = [&](const char* key, double absent) {
      std::vector<double> out(static_cast<std::size_t>(mc.n), absent);
      if (j.contains(key)) {
        auto arr = j.at(key).get<std::vector<double>>();
        if (arr.size() != out.size())
          throw std::domain_error(std::string("constraints file: bad length for ") + key);
        out = arr;
      }
      return out;
    };
    mc.sigma2 = read("sigma2", tb::kInf);
    mc.skew_lo = read("skew", -tb::kInf);
    mc.kurt_hi = read("kurt", tb::kInf);
  } else {
    if (cf.n < 1) throw std::domain_error("--n is required");
    if (!cf.sigma2 && !cf.skew && !cf.kurt)
      throw std::domain_error("at least one of --sigma2/--skew/--kurt (or --constraints) is required");
    mc = tb::MomentConstraints::uniform(cf.n, cf.sigma2.value_or(tb::kInf),
                                        cf.skew.value_or(-tb::kInf), cf.kurt.value_or(tb::kInf));
  }
  mc.validate();
  return mc;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::domain_error("cannot open output file: " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
}

tb::DiscreteDistribution dist_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open distribution file: " + path);
  json j = json::parse(in);
  return tb::DiscreteDistribution(j.at("atoms").get<std::vector<double>>(),
                                  j.at("weights").get<std::vector<double>>());
}

tb::TableRow table_row(const tb::BinomialModel& m, const tb::MomentConstraints& mc, double x) {
  tb::BoundReport r = tb::bound_report(mc, x);
  double xc = std::clamp(x, m.atoms.front(), m.atoms.back());
  tb::TableRow row;
  row.x = x;
  row.tail_step = tb::survival_at(m, x);
  row.tail_interp = (x <= m.atoms.back()) ? tb::survival_interp(m, xc) : 0.0;
  row.g2 = r.g2;
  row.hoeffding = r.hoeffding;
  row.poisson_closed = r.poisson_closed;
  row.poisson_g2 = r.poisson_g2;
  row.tightness = r.tightness;
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail probability bounds from variance, skewness, and kurtosis constraints"};
  app.require_subcommand(1);

  // bound
  auto* bound = app.add_subcommand("bound", "compute a bound report at a threshold");
  ConstraintFlags bound_cf;
  double bound_x = 0.0;
  std::string bound_format = "human", bound_out;
  add_constraint_flags(bound, bound_cf);
  bound->add_option("--x", bound_x, "threshold")->required();
  bound->add_option("--format", bound_format, "human|json")
      ->check(CLI::IsMember({"human", "json"}));
  bound->add_option("--output", bound_out, "output path (default stdout)");

  // table
  auto* table = app.add_subcommand("table", "emit a CSV curve of all bounds");
  ConstraintFlags table_cf;
  int table_points = 0;
  bool table_atoms = false;
  std::string table_out;
  add_constraint_flags(table, table_cf);
  table->add_option("--points", table_points, "number of uniform x points on (0, n]");
  table->add_flag("--at-atoms", table_atoms, "include rows at all atoms and breakpoints");
  table->add_option("--output", table_out, "output path (default stdout)");

  // transform
  auto* transform = app.add_subcommand("transform", "evaluate survival-function transforms");
  std::string tf_dist;
  std::optional<double> tf_poisson;
  double tf_x = 0.0, tf_beta = 2.0, tf_eps = 1e-12;
  std::string tf_out;
  transform->add_option("--dist", tf_dist, "json file with atoms/weights");
  transform->add_option("--poisson", tf_poisson, "centered Poisson law with this lambda");
  transform->add_option("--tail-eps", tf_eps, "Poisson truncation tail mass");
  transform->add_option("--x", tf_x, "threshold")->required();
  transform->add_option("--beta", tf_beta, "transform exponent");
  transform->add_option("--output", tf_out, "output path (default stdout)");

  // simulate / verify share flags
  struct SimFlags {
    ConstraintFlags cf;
    std::optional<double> law_sigma2;
    std::vector<double> three_pt;
    std::string dist_file;
    bool adapted = false, maximal = false;
    std::uint64_t samples = 0, seed = 0;
    std::vector<double> xs;
    std::string out;
  };
  auto add_sim_flags = [](CLI::App* cmd, SimFlags& sf) {
    cmd->add_option("--n", sf.cf.n, "number of steps")->required();
    cmd->add_option("--law-sigma2", sf.law_sigma2, "two-point step law variance");
    cmd->add_option("--three-point", sf.three_pt, "three-point step law: a w")->expected(2);
    cmd->add_option("--dist", sf.dist_file, "json file with the step law");
    cmd->add_flag("--adapted", sf.adapted, "two-regime adapted example");
    cmd->add_flag("--maximal", sf.maximal, "threshold the running maximum");
    cmd->add_option("--samples", sf.samples, "Monte Carlo paths")->required();
    cmd->add_option("--seed", sf.seed, "RNG seed");
    cmd->add_option("--xs", sf.xs, "thresholds")->required()->expected(-1);
    cmd->add_option("--output", sf.out, "output path (default stdout)");
  };
  auto* simulate = app.add_subcommand("simulate", "estimate empirical tails by Monte Carlo");
  SimFlags sim;
  add_sim_flags(simulate, sim);
  auto* verify = app.add_subcommand("verify", "check that bounds dominate empirical tails");
  SimFlags ver;
  add_sim_flags(verify, ver);
  verify->add_option("--sigma2", ver.cf.sigma2, "variance cap for the bound");
  verify->add_option("--skew", ver.cf.skew, "skewness floor for the bound");
  verify->add_option("--kurt", ver.cf.kurt, "kurtosis cap for the bound");
  verify->add_option("--constraints", ver.cf.file, "json constraints file for the bound");
  bool inject_zero = false;
  verify->add_flag("--inject-zero-bound", inject_zero, "self-test hook: force a FAIL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto make_spec = [](const SimFlags& sf) {
    tb::SimSpec spec;
    spec.n = sf.cf.n;
    spec.adapted = sf.adapted;
    spec.maximal = sf.maximal;
    spec.samples = sf.samples;
    spec.seed = sf.seed;
    if (!sf.dist_file.empty())
      spec.step_law = dist_from_file(sf.dist_file);
    else if (!sf.three_pt.empty())
      spec.step_law = tb::three_point(sf.three_pt[0], sf.three_pt[1]);
    else if (sf.law_sigma2)
      spec.step_law = tb::two_point(*sf.law_sigma2);
    else if (!sf.adapted)
      throw std::domain_error("a step law is required (--law-sigma2/--three-point/--dist)");
    return spec;
  };

  try {
    if (bound->parsed()) {
      tb::BoundReport r = tb::bound_report(make_constraints(bound_cf), bound_x);
      emit(bound_format == "json" ? tb::render_report_json(r) : tb::render_report_human(r),
           bound_out);
      return 0;
    }

    if (table->parsed()) {
      tb::MomentConstraints mc = make_constraints(table_cf);
      tb::AggregationResult agg = tb::aggregate(mc);
      tb::BinomialModel m = tb::build_model(mc.n, agg.sigma2_eff);
      std::vector<double> xs;
      for (int i = 1; i <= table_points; ++i)
        xs.push_back(static_cast<double>(mc.n) * i / table_points);
      if (table_atoms) {
        xs.insert(xs.end(), m.atoms.begin(), m.atoms.end());
        xs.insert(xs.end(), m.breakpoints.begin(), m.breakpoints.end());
      }
      if (xs.empty()) throw std::domain_error("table: need --points and/or --at-atoms");
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      std::vector<tb::TableRow> rows;
      for (double x : xs) rows.push_back(table_row(m, mc, x));
      emit(tb::render_table_csv(rows), table_out);
      return 0;
    }

    if (transform->parsed()) {
      tb::DiscreteDistribution d =
          tf_poisson ? tb::truncated_poisson(*tf_poisson, tf_eps) : dist_from_file(tf_dist);
      tb::detail::JsonWriter w;
      w.open();
      w.field("x", tf_x);
      w.field("beta", tf_beta);
      w.field("g_beta", tb::g_beta(d, tf_x, tf_beta));
      w.field("g2_oracle", tb::g2_oracle(d, tf_x));
      w.field("chernoff", tb::chernoff_inf(d, tf_x));
      if (tf_poisson) w.field("poisson_closed", tb::poisson_closed_bound(*tf_poisson, std::max(tf_x, 0.0)));
      w.close();
      emit(w.out, tf_out);
      return 0;
    }

    if (simulate->parsed()) {
      tb::SimSpec spec = make_spec(sim);
      tb::detail::JsonWriter w;
      w.open();
      w.field("n", static_cast<std::uint64_t>(spec.n));
      w.field("samples", spec.samples);
      w.field("seed", spec.seed);
      w.field("adapted", spec.adapted);
      w.field("maximal", spec.maximal);
      w.key("results");
      w.out += '[';
      bool first = true;
      for (double x : sim.xs) {
        tb::EmpiricalTail t = tb::simulate_tail(spec, x);
        if (!first) w.out += ',';
        first = false;
        tb::detail::JsonWriter e;
        e.open();
        e.field("x", t.x);
        e.field("estimate", t.estimate);
        e.field("stderr", t.stderr_est);
        e.close();
        w.out += e.out;
      }
      w.out += ']';
      w.close();
      emit(w.out, sim.out);
      return 0;
    }

    if (verify->parsed()) {
      tb::SimSpec spec = make_spec(ver);
      tb::MomentConstraints mc;
      if (!ver.cf.file.empty() || ver.cf.sigma2 || ver.cf.skew || ver.cf.kurt) {
        ver.cf.n = spec.n;
        mc = make_constraints(ver.cf);
      } else if (spec.adapted) {
        mc = tb::adapted_example_constraints(spec.n);
      } else {
        mc = tb::MomentConstraints::uniform(spec.n, spec.step_law.variance(), -tb::kInf, tb::kInf);
      }
      bool all_pass = true;
      std::string out = "[";
      bool first = true;
      for (double x : ver.xs) {
        tb::BoundReport r = tb::bound_report(mc, x);
        if (inject_zero) {
          r.g2 = 0.0;
          r.g2_oracle_check = 0.0;
        }
        tb::EmpiricalTail t = tb::simulate_tail(spec, x);
        tb::VerifyRecord v = tb::verify_bound(r, t);
        all_pass = all_pass && v.pass;
        if (!first) out += ',';
        first = false;
        out += tb::render_verdict_json(v);
      }
      out += ']';
      emit(out, ver.out);
      return all_pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
