#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>
#include <variant>

#include <CLI11.hpp>

#include "confcurve/classic.hpp"
#include "confcurve/combine.hpp"
#include "confcurve/exact_binary.hpp"
#include "confcurve/heterogeneity.hpp"
#include "confcurve/infer.hpp"
#include "confcurve/simulate.hpp"
#include "study_csv.hpp"
#include "table.hpp"

namespace confcurve::cli {
namespace {

// A requested analysis: a combination rule or a classic comparator.
using AnyMethod = std::variant<Method, ClassicMethod>;

std::string method_name(const AnyMethod& m) {
  return std::visit([](auto v) { return std::string(to_string(v)); }, m);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<AnyMethod> parse_methods(const std::string& text) {
  if (text == "all") {
    return {Method::edgington, Method::fisher,      Method::pearson,
            Method::tippett,   Method::wilkinson,   ClassicMethod::fixed,
            ClassicMethod::dl, ClassicMethod::hk};
  }
  std::vector<AnyMethod> out;
  for (const auto& name : split_list(text)) {
    if (name == "fixed") {
      out.emplace_back(ClassicMethod::fixed);
    } else if (name == "dl") {
      out.emplace_back(ClassicMethod::dl);
    } else if (name == "hk") {
      out.emplace_back(ClassicMethod::hk);
    } else {
      try {
        out.emplace_back(parse_method(name));
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
    }
  }
  if (out.empty()) throw InputError("--method: no methods given");
  return out;
}

struct Grid {
  double lo;
  double hi;
  int points;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * i / (points - 1);
    return v;
  }
};

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    if (parts.size() != 3) throw std::invalid_argument("");
    std::size_t used = 0;
    Grid g{};
    g.lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("");
    g.hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("");
    g.points = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("");
    if (!(g.hi > g.lo) || g.points < 2) throw std::invalid_argument("");
    return g;
  } catch (const std::exception&) {
    throw InputError("--grid: expected LO:HI:N with LO < HI and N >= 2, got '" + text + "'");
  }
}

enum class Het { none, additive, multiplicative };

Het parse_het(const std::string& name) {
  if (name == "none") return Het::none;
  if (name == "additive") return Het::additive;
  if (name == "multiplicative") return Het::multiplicative;
  throw InputError("--het: expected none, additive or multiplicative");
}

struct AnalysisOptions {
  std::string input;
  std::string methods = "all";
  std::string alternative = "less";
  double level = 0.95;
  std::string het = "none";
  std::string tau2 = "reml";
  bool exact = false;
  std::string grid;
  std::string format = "csv";
  std::string out;
};

// Everything the analysis subcommands need, derived once from the input.
struct Prepared {
  std::vector<StudyRow> rows;
  std::vector<Study> studies;  // empty when exact-only data cannot be normalised
  std::string studies_error;
  std::vector<Table2x2> tables;
  Orientation orientation = Orientation::less;
  bool exact = false;
  Adjustment adj;
  Tau2Estimator estimator = Tau2Estimator::reml;
  double level = 0.95;

  const std::vector<Study>& normal_studies() const {
    if (studies.empty()) throw InputError(studies_error);
    return studies;
  }

  std::size_t size() const { return rows.size(); }

  PValueFunction pfunction(Method m) const {
    if (exact) return make_exact_pfunction(tables, m, orientation);
    return make_pfunction(normal_studies(), m, orientation, adj);
  }

  // Centre and spread used to pick default plotting grids.
  std::pair<double, double> display_range() const {
    double lo = 1e300, hi = -1e300;
    for (const auto& r : rows) {
      double est, se;
      if (r.has_effect) {
        est = r.estimate;
        se = r.se;
      } else {
        const double a = r.counts.events_treat + 0.5, b = r.counts.n_treat - r.counts.events_treat + 0.5;
        const double c = r.counts.events_ctrl + 0.5, d = r.counts.n_ctrl - r.counts.events_ctrl + 0.5;
        est = std::log(a * d / (b * c));
        se = std::sqrt(1 / a + 1 / b + 1 / c + 1 / d);
      }
      lo = std::min(lo, est - 3.0 * se);
      hi = std::max(hi, est + 3.0 * se);
    }
    return {lo, hi};
  }
};

Prepared prepare(const AnalysisOptions& o) {
  Prepared p;
  std::ifstream file;
  std::istream* in = nullptr;
  if (o.input == "-") {
    in = &std::cin;
  } else {
    file.open(o.input);
    if (!file) throw InputError("cannot open input file '" + o.input + "'");
    in = &file;
  }
  p.rows = read_study_csv(*in, o.input);
  try {
    p.orientation = parse_orientation(o.alternative);
    p.estimator = parse_tau2_estimator(o.tau2);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (p.estimator == Tau2Estimator::none) throw InputError("--tau2: expected dl or reml");
  if (!(o.level > 0.0 && o.level < 1.0)) throw InputError("--level must lie in (0, 1)");
  p.level = o.level;
  p.exact = o.exact;
  const Het het = parse_het(o.het);

  if (p.exact) {
    if (het != Het::none) {
      throw InputError("--exact does not support heterogeneity adjustment (use --het none)");
    }
    for (const auto& r : p.rows) {
      if (!r.has_counts) {
        throw InputError(o.input + ":" + std::to_string(r.line) +
                         ": --exact needs count columns e_t,n_t,e_c,n_c");
      }
      p.tables.push_back(table_from_counts(r.counts));
    }
    try {
      p.studies = to_studies(p.rows, o.input);
    } catch (const InputError& e) {
      p.studies_error = e.what();
    }
  } else {
    p.studies = to_studies(p.rows, o.input);
  }

  if (het != Het::none) {
    const auto& s = p.normal_studies();
    if (s.size() < 2) throw InputError("--het " + o.het + " needs at least two studies");
    const HeterogeneityEstimate h = estimate_heterogeneity(s, p.estimator);
    if (het == Het::additive) p.adj.tau2 = h.tau2;
    if (het == Het::multiplicative) p.adj.phi = h.phi;
  }
  return p;
}

double classic_tau2(const Prepared& p) {
  const auto& s = p.normal_studies();
  if (s.size() < 2) return 0.0;
  return p.estimator == Tau2Estimator::dl ? tau2_dl(s) : tau2_reml(s).tau2;
}

ClassicResult run_classic(const Prepared& p, ClassicMethod m) {
  const auto& s = p.normal_studies();
  switch (m) {
    case ClassicMethod::fixed:
      return fixed_effect(s, p.level);
    case ClassicMethod::dl:
      if (s.size() < 2) {
        ClassicResult r = fixed_effect(s, p.level);
        r.method = ClassicMethod::dl;
        return r;
      }
      return random_effects(s, p.level, classic_tau2(p));
    case ClassicMethod::hk:
      if (s.size() < 2) throw InputError("method hk needs at least two studies");
      return hartung_knapp(s, p.level, classic_tau2(p));
  }
  throw std::logic_error("unhandled classic method");
}

std::vector<AnyMethod> applicable(const std::vector<AnyMethod>& requested, const Prepared& p,
                                  bool explicit_list) {
  std::vector<AnyMethod> out;
  for (const auto& m : requested) {
    const bool hk = std::holds_alternative<ClassicMethod>(m) &&
                    std::get<ClassicMethod>(m) == ClassicMethod::hk;
    if (hk && p.size() < 2 && !explicit_list) continue;
    // Exact-only data (zero cells) has no log odds ratios for the classic rows.
    if (std::holds_alternative<ClassicMethod>(m) && p.studies.empty() && !explicit_list) continue;
    out.push_back(m);
  }
  return out;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_analyze(const AnalysisOptions& o, std::ostream& out, std::ostream& err) {
  const Format format = parse_format(o.format);
  const Prepared p = prepare(o);
  const auto methods = applicable(parse_methods(o.methods), p, o.methods != "all");
  Table t;
  t.columns = {"method", "estimate", "lower",  "upper",     "p_value",   "width",
               "aucc",   "ci_skewness", "aucc_ratio", "converged", "tau2", "phi"};
  bool all_converged = true;
  for (const auto& m : methods) {
    if (const auto* cm = std::get_if<Method>(&m)) {
      const MetaResult r = analyze(p.pfunction(*cm), p.level);
      all_converged = all_converged && r.converged;
      t.add_row({method_name(m), r.estimate, r.lower, r.upper, r.p_null, r.width, r.aucc,
                 r.beta_skew, r.aucc_ratio, r.converged, p.adj.tau2, p.adj.phi});
    } else {
      const ClassicResult r = run_classic(p, std::get<ClassicMethod>(m));
      if (r.degenerate) {
        err << "warning: " << method_name(m)
            << " interval has zero width (all estimates coincide)\n";
      }
      const double beta = r.upper > r.lower ? (r.upper + r.lower - 2.0 * r.estimate) /
                                                  (r.upper - r.lower)
                                            : 0.0;
      t.add_row({method_name(m), r.estimate, r.lower, r.upper, r.p_null, r.upper - r.lower,
                 Null{}, beta, Null{}, true, r.tau2_used, 1.0});
    }
  }
  Output sink(o.out, out);
  write_table(t, format, sink.get());
  if (!all_converged) {
    err << "warning: at least one method did not converge (rows flagged)\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_drapery(const AnalysisOptions& o, std::ostream& out, std::ostream& err) {
  const Format format = parse_format(o.format);
  const Prepared p = prepare(o);
  const auto methods = applicable(parse_methods(o.methods), p, o.methods != "all");
  Grid grid{};
  if (o.grid.empty()) {
    const auto [lo, hi] = p.display_range();
    grid = {lo, hi, 401};
  } else {
    grid = parse_grid(o.grid);
  }
  const std::vector<double> mus = grid.values();

  Table t;
  t.columns = {"mu", "series_id", "value"};
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const std::string series = "study:" + p.rows[i].id;
    const PValueFunction f =
        p.exact ? make_exact_pfunction(std::span(p.tables).subspan(i, 1), Method::edgington,
                                       p.orientation)
                : make_pfunction(std::span(p.normal_studies()).subspan(i, 1), Method::edgington,
                                 p.orientation, p.adj);
    for (double mu : mus) t.add_row({mu, series, centrality(f, mu)});
  }
  bool all_converged = true;
  for (const auto& m : methods) {
    const std::string series = "method:" + method_name(m);
    std::vector<double> points = mus;
    std::function<double(double)> curve;
    if (const auto* cm = std::get_if<Method>(&m)) {
      const PValueFunction f = p.pfunction(*cm);
      const LevelCrossing est = median_estimate(f);
      all_converged = all_converged && est.converged;
      if (est.converged) points.push_back(est.mu);
      curve = [f](double mu) { return centrality(f, mu); };
    } else {
      const ClassicResult r = run_classic(p, std::get<ClassicMethod>(m));
      points.push_back(r.estimate);
      const int k = static_cast<int>(p.size());
      curve = [r, k](double mu) { return classic_centrality(r, mu, k); };
    }
    std::sort(points.begin(), points.end());
    for (double mu : points) t.add_row({mu, series, curve(mu)});
  }
  Output sink(o.out, out);
  write_table(t, format, sink.get());
  if (!all_converged) {
    err << "warning: at least one method did not converge\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_density(const AnalysisOptions& o, std::ostream& out, std::ostream& /*err*/) {
  const Format format = parse_format(o.format);
  const Prepared p = prepare(o);
  const std::string name = o.methods == "all" ? "edgington" : o.methods;
  const auto methods = parse_methods(name);
  if (methods.size() != 1 || !std::holds_alternative<Method>(methods.front())) {
    throw InputError("density: --method must name a single combination method");
  }
  const PValueFunction f = p.pfunction(std::get<Method>(methods.front()));
  if (!median_estimate(f).converged) return kExitNonConvergence;
  std::vector<DensityPoint> pts;
  if (o.grid.empty()) {
    pts = confidence_density(f);
  } else {
    const auto mus = parse_grid(o.grid).values();
    pts = confidence_density(f, mus);
  }
  Table t;
  t.columns = {"mu", "density"};
  for (const auto& pt : pts) t.add_row({pt.mu, pt.density});
  Output sink(o.out, out);
  write_table(t, format, sink.get());
  return kExitOk;
}

struct SimulateOptions {
  std::string k = "5,10";
  std::string large = "0";
  std::string i2 = "0";
  std::string shape = "0";
  std::string het = "none";
  int n_sim = 2000;
  double theta = 0.2;
  std::string methods = "all";
  std::string alternative = "greater";
  std::int64_t seed = 1;
  int threads = 0;
  std::string format = "csv";
  std::string out;
};

template <class T>
std::vector<T> parse_numbers(const std::string& text, const char* flag) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      T value;
      if constexpr (std::is_integral_v<T>) {
        value = static_cast<T>(std::stoll(item, &used));
      } else {
        value = std::stod(item, &used);
      }
      if (used != item.size()) throw std::invalid_argument("");
      out.push_back(value);
    } catch (const std::exception&) {
      throw InputError(std::string(flag) + ": '" + item + "' is not a valid number");
    }
  }
  if (out.empty()) throw InputError(std::string(flag) + ": empty list");
  return out;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONFCURVE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw InputError("CONFCURVE_THREADS must be a positive integer");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& /*err*/) {
  const Format format = parse_format(o.format);
  SimAdjust adjust;
  if (o.het == "none") {
    adjust = SimAdjust::none;
  } else if (o.het == "additive") {
    adjust = SimAdjust::additive_reml;
  } else {
    throw InputError("simulate: --het must be none or additive");
  }
  std::vector<SimMethod> methods;
  if (o.methods == "all") {
    methods.assign(std::begin(kAllSimMethods), std::end(kAllSimMethods));
  } else {
    for (const auto& name : split_list(o.methods)) {
      try {
        methods.push_back(parse_sim_method(name));
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
    }
  }
  if (methods.empty()) throw InputError("--method: no methods given");
  if (o.n_sim < 1) throw InputError("--nsim must be positive");
  SimOptions options;
  try {
    options.orientation = parse_orientation(o.alternative);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  options.threads = resolve_threads(o.threads);

  std::vector<SimScenario> scenarios;
  for (int k : parse_numbers<int>(o.k, "--k")) {
    for (int large : parse_numbers<int>(o.large, "--large")) {
      for (double i2 : parse_numbers<double>(o.i2, "--i2")) {
        for (double shape : parse_numbers<double>(o.shape, "--shape")) {
          SimScenario s;
          s.k = k;
          s.n_large = large;
          s.i2 = i2;
          s.theta = o.theta;
          s.shape_alpha = shape;
          s.n_sim = o.n_sim;
          s.base_seed = static_cast<std::uint64_t>(o.seed);
          s.adjust = adjust;
          try {
            validate(s);
          } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
          }
          const bool needs_two = std::any_of(methods.begin(), methods.end(), [](SimMethod m) {
            return m == SimMethod::dl || m == SimMethod::hk;
          });
          if (needs_two && k < 2) throw InputError("scenario: dl and hk need k >= 2");
          scenarios.push_back(s);
        }
      }
    }
  }

  Table t;
  t.columns = {"k",          "n_large",          "i2",
               "shape",      "adjust",           "n_sim",
               "seed",       "tau2",             "estimand_mean",
               "estimand_median", "method",      "n_converged",
               "convergence_rate", "coverage",   "coverage_mcse",
               "coverage_median",  "coverage_median_mcse", "bias",
               "bias_mcse",  "bias_median",      "bias_median_mcse",
               "width",      "width_mcse",       "aucc",
               "aucc_ratio", "beta_mean",        "beta_median",
               "beta_min",   "beta_max",         "kappa_beta_gamma",
               "kappa_ratio_gamma", "cor_beta_gamma"};
  for (const auto& s : scenarios) {
    const SimSummary sum = run_scenario(s, methods, options);
    for (const auto& m : sum.methods) {
      t.add_row({std::int64_t{s.k}, std::int64_t{s.n_large}, s.i2, s.shape_alpha,
                 std::string(to_string(s.adjust)), std::int64_t{s.n_sim},
                 static_cast<std::int64_t>(s.base_seed), sum.tau2, sum.estimands.mean,
                 sum.estimands.median, std::string(to_string(m.method)),
                 std::int64_t{m.n_converged}, m.convergence_rate, m.coverage.mean,
                 m.coverage.mcse, m.coverage_median.mean, m.coverage_median.mcse, m.bias.mean,
                 m.bias.mcse, m.bias_median.mean, m.bias_median.mcse, m.width.mean,
                 m.width.mcse, m.mean_aucc, m.mean_aucc_ratio, m.beta.mean, m.beta.median,
                 m.beta.min, m.beta.max, m.kappa_beta_gamma, m.kappa_ratio_gamma,
                 m.cor_beta_gamma});
    }
  }
  Output sink(o.out, out);
  write_table(t, format, sink.get());
  return kExitOk;
}

void add_analysis_options(CLI::App* cmd, AnalysisOptions& o, bool with_grid) {
  cmd->add_option("input", o.input, "study CSV (columns id,estimate,se or id,e_t,n_t,e_c,n_c; - for stdin)")
      ->required();
  cmd->add_option("--method", o.methods,
                  "comma list of edgington,fisher,pearson,tippett,wilkinson,fixed,dl,hk or all");
  cmd->add_option("--alternative", o.alternative, "greater|less");
  cmd->add_option("--level", o.level, "confidence level");
  cmd->add_option("--het", o.het, "none|additive|multiplicative");
  cmd->add_option("--tau2", o.tau2, "dl|reml");
  cmd->add_flag("--exact", o.exact, "exact mid-p p-values from 2x2 counts");
  if (with_grid) cmd->add_option("--grid", o.grid, "LO:HI:N");
  cmd->add_option("--format", o.format, "csv|json");
  cmd->add_option("--out", o.out, "output path (default stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Meta-analysis with combined p-value functions"};
  app.require_subcommand(1);

  AnalysisOptions analyze_opts, drapery_opts, density_opts;
  SimulateOptions sim_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "point estimates, intervals and diagnostics");
  add_analysis_options(analyze_cmd, analyze_opts, false);
  auto* drapery_cmd = app.add_subcommand("drapery", "confidence curves on a grid");
  add_analysis_options(drapery_cmd, drapery_opts, true);
  auto* density_cmd = app.add_subcommand("density", "confidence density on a grid");
  add_analysis_options(density_cmd, density_opts, true);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo simulation study");
  sim_cmd->add_option("--k", sim_opts.k, "numbers of studies (comma list)");
  sim_cmd->add_option("--large", sim_opts.large, "numbers of large studies (comma list)");
  sim_cmd->add_option("--i2", sim_opts.i2, "Higgins' I2 values (comma list)");
  sim_cmd->add_option("--shape", sim_opts.shape, "skew-normal shape values (comma list)");
  sim_cmd->add_option("--het", sim_opts.het, "none|additive");
  sim_cmd->add_option("--nsim", sim_opts.n_sim, "repetitions per scenario");
  sim_cmd->add_option("--theta", sim_opts.theta, "mean true effect");
  sim_cmd->add_option("--method", sim_opts.methods, "comma list of methods or all");
  sim_cmd->add_option("--alternative", sim_opts.alternative, "greater|less");
  sim_cmd->add_option("--seed", sim_opts.seed, "base seed");
  sim_cmd->add_option("--threads", sim_opts.threads, "worker threads");
  sim_cmd->add_option("--format", sim_opts.format, "csv|json");
  sim_cmd->add_option("--out", sim_opts.out, "output path (default stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_opts, out, err);
    if (drapery_cmd->parsed()) return cmd_drapery(drapery_opts, out, err);
    if (density_cmd->parsed()) return cmd_density(density_opts, out, err);
    if (sim_cmd->parsed()) return cmd_simulate(sim_opts, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace confcurve::cli
