// qmax: distribution, moments, and near-critical expansions of the maximum
// queue length during an M/M/1 busy period, plus a Monte Carlo cross-check.

#include <qmax/asymptotic.hpp>
#include <qmax/errors.hpp>
#include <qmax/exact.hpp>
#include <qmax/series.hpp>
#include <qmax/simulate.hpp>
#include <qmax/traffic.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace qmax;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct OutputSpec {
  std::string format = "csv";
  std::string path;  // empty -> stdout

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot open output file: " + path);
    f << text;
  }
};

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

// Shared --lambda / --u pair; exactly one must be given.
struct IntensityOpt {
  double lambda = 0.0;
  double u = 0.0;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* u_opt = nullptr;

  void attach(CLI::App* cmd) {
    lambda_opt = cmd->add_option("--lambda", lambda, "traffic intensity (arrival/service rate)");
    u_opt = cmd->add_option("--u", u, "1 - lambda, preferred near the critical point");
    lambda_opt->excludes(u_opt);
    u_opt->excludes(lambda_opt);
  }

  TrafficIntensity value() const {
    if (u_opt->count() > 0) return TrafficIntensity::from_u(u);
    if (lambda_opt->count() > 0) return TrafficIntensity::from_lambda(lambda);
    throw CLI::RequiredError("--lambda or --u");
  }
};

void warn_if_extreme(const TrafficIntensity& ti, const char* route) {
  if (!ti.is_critical() && ti.u() < 1e-6)
    std::cerr << "warning: u = 1 - lambda below 1e-6; the " << route
              << " route sums very slowly here, the asymptotic route is preferred\n";
}

// ---------------------------------------------------------------- dist ----

struct DistArgs {
  IntensityOpt intensity;
  long lmax = 10;
  OutputSpec out;
};

void run_dist(const DistArgs& a) {
  if (a.lmax < 0) throw std::invalid_argument("dist: --lmax must be >= 0");
  const TrafficIntensity ti = a.intensity.value();
  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (long l = 0; l <= a.lmax; ++l) {
    const double tail = exact::tail_probability(ti, l);
    const double p = l == 0 ? 0.0 : exact::pmf(ti, l);
    rows.push_back({std::to_string(l), fmt17(tail), fmt17(p)});
    jrows.push_back({{"l", l}, {"tail", tail}, {"pmf", p}});
  }
  if (a.out.format == "json")
    a.out.write(json{{"lambda", ti.lambda()}, {"rows", jrows}}.dump(2) + "\n");
  else
    a.out.write(render_csv({"l", "tail", "pmf"}, rows));
}

// -------------------------------------------------------------- moment ----

struct MomentArgs {
  IntensityOpt intensity;
  int k = 1;
  std::string method = "exact";
  double tol = 1e-12;
  int order = 4;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t step_cap = simulate::kDefaultStepCap;
  OutputSpec out;
};

// Smallest power-of-two horizon whose geometric tail meets the tolerance.
double brute_with_auto_horizon(int k, const TrafficIntensity& ti, const Tolerance& tol,
                               long* chosen) {
  constexpr long kHorizonCap = 1L << 24;
  for (long l_max = 1024;; l_max *= 2) {
    try {
      const double v = exact::brute_force_moment(k, ti, l_max, tol);
      *chosen = l_max;
      return v;
    } catch (const ConvergenceError&) {
      if (l_max >= kHorizonCap) throw;
    }
  }
}

void run_moment(const MomentArgs& a) {
  if (a.k < 1) throw std::invalid_argument("moment: --k must be >= 1");
  const TrafficIntensity ti = a.intensity.value();
  const Tolerance tol(a.tol);

  struct Row {
    std::string method;
    double value;
    std::optional<double> err;
    std::string detail;
  };
  std::vector<Row> rows;

  auto run_one = [&](const std::string& method) {
    if (method == "exact") {
      warn_if_extreme(ti, "exact");
      rows.push_back({"exact", exact::moment(a.k, ti, tol), {},
                      "tol=" + fmt17(a.tol)});
    } else if (method == "brute") {
      warn_if_extreme(ti, "brute");
      long used = 0;
      const double v = brute_with_auto_horizon(a.k, ti, tol, &used);
      rows.push_back({"brute", v, {}, "tol=" + fmt17(a.tol) + " lmax=" + std::to_string(used)});
    } else if (method == "asymptotic") {
      const auto series = asymptotic::moment_expansion(a.k, a.order);
      rows.push_back({"asymptotic", series::evaluate(series, ti), {},
                      "order=" + std::to_string(a.order)});
    } else if (method == "simulate") {
      const auto s = simulate::simulate_many(ti, a.samples, {a.seed}, a.step_cap);
      const double se = a.k == 1 ? s.stderr_mean() : 0.0;
      Row r{"simulate", s.raw_moment(a.k), {},
            "samples=" + std::to_string(a.samples) + " seed=" + std::to_string(a.seed)};
      if (a.k == 1) r.err = se;
      rows.push_back(r);
    } else {
      throw std::invalid_argument("moment: unknown method '" + method + "'");
    }
  };

  if (a.method == "all") {
    for (const char* m : {"exact", "brute", "asymptotic", "simulate"}) run_one(m);
  } else {
    run_one(a.method);
  }

  std::vector<std::vector<std::string>> csv;
  json jrows = json::array();
  for (const auto& r : rows) {
    csv.push_back({r.method, std::to_string(a.k), fmt17(ti.lambda()), fmt17(r.value),
                   r.err ? fmt17(*r.err) : "", r.detail});
    json jr = {{"method", r.method}, {"k", a.k}, {"lambda", ti.lambda()},
               {"value", r.value}, {"detail", r.detail}};
    if (r.err) jr["stderr"] = *r.err;
    jrows.push_back(jr);
  }
  if (a.out.format == "json")
    a.out.write(jrows.dump(2) + "\n");
  else
    a.out.write(render_csv({"method", "k", "lambda", "value", "stderr", "detail"}, csv));
}

// -------------------------------------------------------------- expand ----

struct ExpandArgs {
  int k = 0;
  bool variance = false;
  int s_j = -1;
  int order = 4;
  OutputSpec out;  // format defaults to text here
  CLI::Option* k_opt = nullptr;
  CLI::Option* var_opt = nullptr;
  CLI::Option* sj_opt = nullptr;
};

void run_expand(const ExpandArgs& a) {
  const int targets = (a.k_opt->count() > 0) + (a.var_opt->count() > 0) + (a.sj_opt->count() > 0);
  if (targets != 1)
    throw std::invalid_argument("expand: pick exactly one of --k, --variance, --s_j");
  if (a.order < 2) throw std::invalid_argument("expand: --order must be >= 2");

  if (a.sj_opt->count() > 0) {
    if (a.s_j < 0) throw std::invalid_argument("expand: --s_j must be >= 0");
    const series::HExpansion table =
        a.s_j == 0 ? asymptotic::s_0_h_expansion(a.order) : asymptotic::s_j_h_expansion(a.s_j, a.order);
    const bool finite = asymptotic::s_j_expansion_is_finite(a.s_j);
    if (a.out.format == "json") {
      json j = series::to_json(table);
      j["finite"] = finite;
      a.out.write(j.dump(2) + "\n");
    } else {
      std::ostringstream os;
      os << "S_" << a.s_j << "(lambda), " << (finite ? "finite" : "truncated") << " expansion\n"
         << series::to_text(table);
      a.out.write(os.str());
    }
    return;
  }

  series::LogLaurentSeries s = a.var_opt->count() > 0
                                   ? asymptotic::variance_expansion(a.order)
                                   : asymptotic::moment_expansion(a.k, a.order);
  if (a.out.format == "json") {
    a.out.write(series::to_json(s).dump(2) + "\n");
  } else {
    std::ostringstream os;
    if (a.var_opt->count() > 0)
      os << "Var[L] near lambda = 1\n";
    else
      os << "Ex[L^" << a.k << "] near lambda = 1\n";
    os << series::to_text(s);
    a.out.write(os.str());
  }
}

// ------------------------------------------------------------- compare ----

struct CompareArgs {
  std::vector<double> lambda_grid;
  std::vector<double> u_grid;
  int k = 1;
  double tol = 1e-12;
  int order = 4;
  std::uint64_t samples = 0;  // 0 = no simulation column
  std::uint64_t seed = 0;
  std::uint64_t step_cap = simulate::kDefaultStepCap;
  OutputSpec out;
};

void run_compare(const CompareArgs& a) {
  if (a.k < 1) throw std::invalid_argument("compare: --k must be >= 1");
  if (a.lambda_grid.empty() && a.u_grid.empty())
    throw std::invalid_argument("compare: the grid is empty; pass --lambda-grid or --u-grid");
  std::vector<TrafficIntensity> grid;
  for (double l : a.lambda_grid) grid.push_back(TrafficIntensity::from_lambda(l));
  for (double u : a.u_grid) grid.push_back(TrafficIntensity::from_u(u));

  const auto expansion = asymptotic::moment_expansion(a.k, a.order);
  const bool with_sim = a.samples > 0;

  std::vector<std::string> header = {"lambda", "exact", "asymptotic"};
  if (with_sim) {
    header.push_back("simulate");
    header.push_back("sim_stderr");
  }
  header.push_back("abs_err");
  header.push_back("rel_err");
  header.push_back("note");

  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  for (const auto& ti : grid) {
    std::string note;
    double ex = 0, as = 0;
    bool have_exact = true;
    json jr;
    jr["lambda"] = ti.lambda();
    try {
      ex = exact::moment(a.k, ti, Tolerance(a.tol));
      jr["exact"] = ex;
    } catch (const std::exception& e) {
      have_exact = false;
      note = std::string("exact: ") + e.what();
    }
    as = series::evaluate(expansion, ti);
    jr["asymptotic"] = as;

    std::vector<std::string> row = {fmt17(ti.lambda()), have_exact ? fmt17(ex) : "", fmt17(as)};
    if (with_sim) {
      try {
        const auto s = simulate::simulate_many(ti, a.samples, {a.seed}, a.step_cap);
        row.push_back(fmt17(s.raw_moment(a.k)));
        row.push_back(a.k == 1 ? fmt17(s.stderr_mean()) : "");
        jr["simulate"] = s.raw_moment(a.k);
      } catch (const std::exception& e) {
        row.push_back("");
        row.push_back("");
        if (!note.empty()) note += "; ";
        note += std::string("simulate: ") + e.what();
      }
    }
    if (have_exact) {
      const double abs_err = std::fabs(as - ex);
      row.push_back(fmt17(abs_err));
      row.push_back(fmt17(abs_err / std::fabs(ex)));
      jr["abs_err"] = abs_err;
      jr["rel_err"] = abs_err / std::fabs(ex);
    } else {
      row.push_back("");
      row.push_back("");
    }
    row.push_back(note);
    jr["note"] = note;
    rows.push_back(row);
    jrows.push_back(jr);
  }
  if (a.out.format == "json")
    a.out.write(jrows.dump(2) + "\n");
  else
    a.out.write(render_csv(header, rows));
}

// ------------------------------------------------------------ simulate ----

struct SimulateArgs {
  IntensityOpt intensity;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t step_cap = simulate::kDefaultStepCap;
  OutputSpec out;  // json default
};

void run_simulate(const SimulateArgs& a) {
  const TrafficIntensity ti = a.intensity.value();
  const auto s = simulate::simulate_many(ti, a.samples, {a.seed}, a.step_cap);
  if (a.out.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [l, c] : s.histogram())
      rows.push_back({std::to_string(l), std::to_string(c)});
    a.out.write(render_csv({"l", "count"}, rows));
  } else {
    a.out.write(simulate::to_json(s).dump(2) + "\n");
  }
}

void add_output_opts(CLI::App* cmd, OutputSpec* out, const std::string& formats) {
  cmd->add_option("--format", out->format, "output format (" + formats + ")")
      ->check(CLI::IsMember(std::vector<std::string>{"csv", "json", "text"}));
  cmd->add_option("--output", out->path, "write to a file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum queue length during an M/M/1 busy period"};
  app.require_subcommand(1);

  DistArgs dist;
  auto* cmd_dist = app.add_subcommand("dist", "tail and point probabilities of the maximum");
  dist.intensity.attach(cmd_dist);
  cmd_dist->add_option("--lmax", dist.lmax, "largest level to print");
  add_output_opts(cmd_dist, &dist.out, "csv|json, default csv");

  MomentArgs moment;
  auto* cmd_moment = app.add_subcommand("moment", "Ex[L^k] by any route");
  moment.intensity.attach(cmd_moment);
  cmd_moment->add_option("--k", moment.k, "moment order, >= 1");
  cmd_moment->add_option("--method", moment.method,
                         "exact | brute | asymptotic | simulate | all")
      ->check(CLI::IsMember(
          std::vector<std::string>{"exact", "brute", "asymptotic", "simulate", "all"}));
  cmd_moment->add_option("--tol", moment.tol, "relative tolerance for the summed routes");
  cmd_moment->add_option("--order", moment.order, "truncation order for the asymptotic route");
  cmd_moment->add_option("--samples", moment.samples, "replicates for the simulate route");
  cmd_moment->add_option("--seed", moment.seed, "random seed");
  cmd_moment->add_option("--step-cap", moment.step_cap, "per-replicate step cap");
  add_output_opts(cmd_moment, &moment.out, "csv|json, default csv");

  ExpandArgs expand;
  expand.out.format = "text";
  auto* cmd_expand = app.add_subcommand("expand", "series around lambda = 1");
  expand.k_opt = cmd_expand->add_option("--k", expand.k, "expand Ex[L^k] in u = 1-lambda");
  expand.var_opt = cmd_expand->add_flag("--variance", expand.variance, "expand Var[L]");
  expand.sj_opt = cmd_expand->add_option("--s_j", expand.s_j,
                                         "expand the Lambert sum S_j in h = -log(lambda)");
  cmd_expand->add_option("--order", expand.order, "truncation order");
  add_output_opts(cmd_expand, &expand.out, "text|json, default text");

  CompareArgs compare;
  auto* cmd_compare = app.add_subcommand("compare", "exact vs asymptotic (vs simulated) moments");
  cmd_compare->add_option("--lambda-grid", compare.lambda_grid, "comma-separated intensities")
      ->delimiter(',');
  cmd_compare->add_option("--u-grid", compare.u_grid, "comma-separated values of 1-lambda")
      ->delimiter(',');
  cmd_compare->add_option("--k", compare.k, "moment order");
  cmd_compare->add_option("--tol", compare.tol, "tolerance for the exact route");
  cmd_compare->add_option("--order", compare.order, "asymptotic truncation order");
  cmd_compare->add_option("--samples", compare.samples,
                          "add a simulation column with this many replicates");
  cmd_compare->add_option("--seed", compare.seed, "random seed");
  cmd_compare->add_option("--step-cap", compare.step_cap, "per-replicate step cap");
  add_output_opts(cmd_compare, &compare.out, "csv|json, default csv");

  SimulateArgs sim;
  sim.out.format = "json";
  auto* cmd_sim = app.add_subcommand("simulate", "raw Monte Carlo summary");
  sim.intensity.attach(cmd_sim);
  cmd_sim->add_option("--samples", sim.samples, "number of busy periods");
  cmd_sim->add_option("--seed", sim.seed, "random seed");
  cmd_sim->add_option("--step-cap", sim.step_cap, "per-replicate step cap");
  add_output_opts(cmd_sim, &sim.out, "json|csv, default json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_dist->parsed()) run_dist(dist);
    if (cmd_moment->parsed()) run_moment(moment);
    if (cmd_expand->parsed()) run_expand(expand);
    if (cmd_compare->parsed()) run_compare(compare);
    if (cmd_sim->parsed()) run_simulate(sim);
    return 0;
  } catch (const StepCapExceeded& e) {
    std::cerr << "error: " << e.what() << " (partial max " << e.partial_max();
    if (e.has_replicate()) std::cerr << ", replicate " << e.replicate();
    std::cerr << ")\n";
    return 4;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const CLI::RequiredError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
