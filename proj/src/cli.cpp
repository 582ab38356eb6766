#include "khop/cli.hpp"

#include "khop/checks.hpp"
#include "khop/cltstats.hpp"
#include "khop/hop_cumulants.hpp"
#include "khop/simulator.hpp"
#include "khop/variance.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace khop {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<Rational> parse_list(const std::vector<std::string>& items) {
  std::vector<Rational> out;
  for (const auto& s : items) out.push_back(parse_rational(s));
  return out;
}

Json strings(const std::vector<Rational>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(to_string(x));
  return a;
}

std::string join(const std::vector<int>& xs, char sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(xs[i]);
  return s;
}

unsigned thread_count(const CLI::Option* opt, unsigned flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("KHOP_THREADS"); env && *env) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v > 4096) throw UsageError("KHOP_THREADS must be a thread count");
    return static_cast<unsigned>(v);
  }
  return 0;
}

struct PolyArgs {
  int k = 0;
  int n = 0;
  std::vector<int> powers;
  std::vector<std::string> tau;
  std::vector<std::string> lambda;
  std::string lambda_equal;
  bool symbolic = false;
  bool tau_equal = false;
  std::string format = "text";
  CLI::Option* n_opt = nullptr;
  CLI::Option* powers_opt = nullptr;
  CLI::Option* lambda_equal_opt = nullptr;
};

void add_poly_options(CLI::App* sub, PolyArgs& a) {
  sub->add_option("--k", a.k, "hop count")->required();
  a.n_opt = sub->add_option("--n", a.n, "number of distinct arguments");
  a.powers_opt = sub->add_option("--powers", a.powers, "powers n1,n2,... of the arguments")->delimiter(',');
  a.n_opt->excludes(a.powers_opt);
  sub->add_option("--tau", a.tau, "argument values, ascending")->delimiter(',');
  auto* lam = sub->add_option("--lambda", a.lambda, "intensities lambda_1..lambda_{k-1}, or one value")->delimiter(',');
  a.lambda_equal_opt = sub->add_option("--lambda-equal", a.lambda_equal, "one intensity for every cell");
  lam->excludes(a.lambda_equal_opt);
  sub->add_flag("--symbolic", a.symbolic, "print the polynomial");
  sub->add_flag("--tau-equal", a.tau_equal, "collapse all arguments to a single tau");
  sub->add_option("--format", a.format)->check(CLI::IsMember({"text", "json", "csv"}));
}

int poly_command(bool cumulant, PolyArgs& a, std::ostream& out, std::ostream& err) {
  const auto& R = registry();
  if ((a.n_opt->count() > 0) == (a.powers_opt->count() > 0)) throw UsageError("give exactly one of --n or --powers");
  std::vector<int> mults = a.n_opt->count() ? std::vector<int>(static_cast<std::size_t>(std::max(a.n, 0)), 1) : a.powers;
  if (mults.empty()) throw UsageError("need at least one argument");
  const std::size_t p = mults.size();

  std::vector<Rational> taus = parse_list(a.tau);
  if (!taus.empty()) {
    if (a.tau_equal) {
      if (taus.size() == 1) taus.assign(p, taus[0]);
      if (taus.size() != p || std::adjacent_find(taus.begin(), taus.end(), std::not_equal_to<>()) != taus.end())
        throw UsageError("--tau-equal needs one tau value");
    }
    if (taus.size() != p) throw UsageError("--tau needs " + std::to_string(p) + " values");
    if (!std::is_sorted(taus.begin(), taus.end())) {
      std::vector<std::size_t> idx(p);
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return taus[x] < taus[y]; });
      std::vector<Rational> t2;
      std::vector<int> m2;
      for (auto i : idx) {
        t2.push_back(taus[i]);
        m2.push_back(mults[i]);
      }
      taus = std::move(t2);
      mults = std::move(m2);
      err << "warning: --tau values reordered ascending\n";
    }
  }

  std::vector<Rational> lambdas = parse_list(a.lambda);
  if (a.lambda_equal_opt->count()) lambdas = {parse_rational(a.lambda_equal)};

  MultiPoly poly;
  if (cumulant) {
    CumulantEngine e;
    poly = e.cumulant(a.k, mults).poly;
  } else {
    MomentEngine e;
    poly = e.moment(a.k, mults).poly;
  }
  if (!lambdas.empty())
    for (const auto& [v, x] : lambda_assignment(a.k, lambdas)) poly = substitute(poly, v, x);
  if (a.tau_equal) {
    std::vector<std::pair<Var, Var>> mapping;
    for (std::size_t i = 1; i <= p; ++i) mapping.emplace_back(R.tau(static_cast<int>(i)), R.tau());
    poly = rename(poly, mapping);
  }

  std::optional<Rational> value;
  if (!taus.empty()) {
    if (lambdas.empty()) throw UsageError("--tau needs --lambda or --lambda-equal");
    Assignment at;
    if (a.tau_equal) at[R.tau()] = taus[0];
    for (std::size_t i = 0; i < p; ++i) at[R.tau(static_cast<int>(i) + 1)] = taus[i];
    value = eval(poly, at);
  }
  const bool show_poly = a.symbolic || !value;
  const std::string kind = cumulant ? "cumulant" : "moment";

  if (a.format == "json") {
    Json j;
    j["quantity"] = kind;
    j["k"] = a.k;
    j["powers"] = mults;
    if (!taus.empty()) j["tau"] = strings(taus);
    if (!lambdas.empty()) j["lambda"] = strings(lambdas);
    if (show_poly) j["polynomial"] = to_string(poly);
    if (value) {
      j["value"] = to_string(*value);
      j["value_float"] = to_double(*value);
    }
    out << j.dump() << '\n';
  } else if (a.format == "csv") {
    out << "quantity,k,powers,polynomial,value\n"
        << kind << ',' << a.k << ',' << join(mults, ';') << ',' << (show_poly ? to_string(poly) : "") << ','
        << (value ? to_string(*value) : "") << '\n';
  } else {
    if (show_poly) out << to_string(poly) << '\n';
    if (value) out << to_string(*value) << '\n';
  }
  return 0;
}

struct VarianceArgs {
  int k = 0;
  std::string tau, lambda;
  std::vector<std::string> lambda_vec;
  bool asymptotic = false, second_moment = false;
  std::string format = "text";
  CLI::Option *tau_opt = nullptr, *lambda_opt = nullptr, *vec_opt = nullptr;
};

int variance_command(VarianceArgs& a, std::ostream& out) {
  const auto& R = registry();
  std::optional<Rational> tau, lambda;
  if (a.tau_opt->count()) tau = parse_rational(a.tau);
  if (a.lambda_opt->count()) lambda = parse_rational(a.lambda);
  std::string quantity = "variance";
  MultiPoly poly;
  if (a.asymptotic) {
    if (!tau || !lambda) throw UsageError("--asymptotic needs --lambda and --tau");
    quantity = "asymptotic_variance";
    poly = variance_asymptotic(a.k, *lambda, *tau);
  } else if (a.vec_opt->count()) {
    if (a.second_moment) throw UsageError("--second-moment needs a single --lambda");
    auto lambdas = parse_list(a.lambda_vec);
    if (lambdas.size() != static_cast<std::size_t>(a.k - 1)) throw UsageError("--lambda-vec needs k-1 values");
    poly = variance_general(a.k);
    for (const auto& [v, x] : lambda_assignment(a.k, lambdas)) poly = substitute(poly, v, x);
  } else {
    if (a.second_moment) quantity = "second_moment";
    poly = a.second_moment ? second_moment_equal(a.k) : variance_equal(a.k);
    if (lambda) poly = substitute(poly, R.lambda(), *lambda);
  }
  if (tau) poly = substitute(poly, R.tau(), *tau);
  std::optional<Rational> value;
  if (poly.is_constant() || poly.is_zero()) value = poly.constant_term();

  if (a.format == "json") {
    Json j;
    j["quantity"] = quantity;
    j["k"] = a.k;
    if (value) {
      j["value"] = to_string(*value);
      j["value_float"] = to_double(*value);
    } else {
      j["polynomial"] = to_string(poly);
    }
    out << j.dump() << '\n';
  } else if (a.format == "csv") {
    out << "quantity,k,value\n" << quantity << ',' << a.k << ',' << (value ? to_string(*value) : to_string(poly)) << '\n';
  } else {
    out << (value ? to_string(*value) : to_string(poly)) << '\n';
  }
  return 0;
}

struct SimulateArgs {
  int k = 0;
  std::string r = "1", t;
  std::vector<std::string> lambda;
  std::uint64_t samples = 0, seed = 0;
  unsigned threads = 0;
  std::string emit, format = "json";
  CLI::Option* threads_opt = nullptr;
};

Json float_or_null(const std::function<double()>& f) {
  try {
    double x = f();
    return std::isfinite(x) ? Json(x) : Json(nullptr);
  } catch (const std::domain_error&) {
    return nullptr;
  }
}

int simulate_command(SimulateArgs& a, std::ostream& out) {
  SimConfig c;
  c.k = a.k;
  c.r = parse_rational(a.r);
  c.t = parse_rational(a.t);
  c.lambdas = parse_list(a.lambda);
  c.n_samples = a.samples;
  c.seed = a.seed;
  c.threads = thread_count(a.threads_opt, a.threads);
  c.validate();
  auto stats = run_simulation(c);
  if (!a.emit.empty()) {
    std::ofstream f(a.emit, std::ios::binary);
    if (!f) throw UsageError("cannot write " + a.emit);
    write_raw_counts(f, c, stats);
  }

  Json j;
  j["n"] = stats.n();
  j["mean"] = float_or_null([&] { return to_double(stats.mean()); });
  j["variance"] = float_or_null([&] { return to_double(stats.k_statistic(2)); });
  j["c3"] = float_or_null([&] { return to_double(stats.k_statistic(3)); });
  j["c4"] = float_or_null([&] { return to_double(stats.k_statistic(4)); });
  j["skewness"] = float_or_null([&] { return stats.skewness(); });
  j["ex_kurtosis"] = float_or_null([&] { return stats.ex_kurtosis(); });
  if (c.k <= 4) {
    CumulantEngine e;
    auto lambdas = engine_lambdas(c);
    Assignment at = lambda_assignment(c.k, lambdas);
    at[registry().tau(1)] = c.tau();
    Json exact;
    const char* names[] = {"mean", "variance", "c3", "c4"};
    for (int n = 1; n <= 4; ++n) exact[names[n - 1]] = to_string(eval(e.diagonal(c.k, n), at));
    j["exact"] = exact;
  }
  Json cfg;
  cfg["k"] = c.k;
  cfg["r"] = to_string(c.r);
  cfg["t"] = to_string(c.t);
  cfg["tau"] = to_string(c.tau());
  cfg["lambda"] = strings(c.lambdas);
  cfg["seed"] = c.seed;
  j["config"] = cfg;
  Json sums = Json::array();
  for (const auto& s : stats.power_sums()) sums.push_back(s.get_str());
  j["power_sums"] = sums;

  if (a.format == "text") {
    for (const auto& [key, v] : j.items())
      if (!v.is_object() && !v.is_array()) out << key << ": " << v.dump() << '\n';
    if (j.contains("exact"))
      for (const auto& [key, v] : j["exact"].items()) out << "exact_" << key << ": " << v.get<std::string>() << '\n';
  } else {
    out << j.dump() << '\n';
  }
  return 0;
}

struct CltArgs {
  int k = 0;
  std::string r = "1", t;
  std::vector<std::string> lambdas{"25", "50", "100", "200", "400"};
  std::uint64_t samples = 100000, seed = 0;
  unsigned threads = 0;
  std::string out_path;
  double synthetic = 0;
  CLI::Option *threads_opt = nullptr, *synthetic_opt = nullptr;
};

int clt_command(CltArgs& a, std::ostream& out) {
  RateExperiment e;
  e.k = a.k;
  e.r = parse_rational(a.r);
  e.t = parse_rational(a.t);
  e.lambdas = parse_list(a.lambdas);
  e.n_samples = a.samples;
  e.seed = a.seed;
  e.threads = thread_count(a.threads_opt, a.threads);
  SimConfig probe;
  probe.k = e.k;
  probe.r = e.r;
  probe.t = e.t;
  probe.validate();
  if (e.lambdas.size() < 3) throw UsageError("--lambdas needs at least 3 values");
  for (std::size_t i = 1; i < e.lambdas.size(); ++i)
    if (!(e.lambdas[i - 1] < e.lambdas[i])) throw UsageError("--lambdas must increase");

  RateSeries series;
  if (a.synthetic_opt->count()) {
    if (!(a.synthetic > 0)) throw UsageError("--synthetic needs a positive constant");
    for (const auto& l : e.lambdas) {
      double d = a.synthetic / std::sqrt(to_double(l));
      series.points.push_back({to_double(l), d, d, e.n_samples});
    }
    fit(series);
  } else {
    series = run_rate_experiment(e);
  }
  if (a.out_path.empty()) {
    write_rate_csv(out, series);
  } else {
    std::ofstream f(a.out_path);
    if (!f) throw UsageError("cannot write " + a.out_path);
    write_rate_csv(f, series);
    out << "slope_ks=" << shortest_double(series.ks_fit.slope) << " slope_w1=" << shortest_double(series.w1_fit.slope) << '\n';
  }
  return 0;
}

int check_command(const std::string& suite, unsigned threads, std::ostream& out) {
  CheckOptions o;
  o.threads = threads;
  bool all = true;
  for (int id : suite_criteria(suite)) {
    auto r = run_criterion(id, o);
    all = all && r.pass;
    out << format_result(r) << std::endl;
  }
  return all ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact moments and cumulants of k-hop counts in the 1D Poisson unit-disk graph", "khop"};
  app.require_subcommand(1, 1);

  PolyArgs margs, cargs;
  add_poly_options(app.add_subcommand("moments", "joint moments of k-hop counts"), margs);
  add_poly_options(app.add_subcommand("cumulants", "joint cumulants of k-hop counts"), cargs);

  VarianceArgs vargs;
  auto* var = app.add_subcommand("variance", "closed-form variance");
  var->add_option("--k", vargs.k)->required();
  vargs.tau_opt = var->add_option("--tau", vargs.tau);
  vargs.lambda_opt = var->add_option("--lambda", vargs.lambda, "common intensity");
  vargs.vec_opt = var->add_option("--lambda-vec", vargs.lambda_vec, "lambda_1..lambda_{k-1}")->delimiter(',');
  vargs.lambda_opt->excludes(vargs.vec_opt);
  auto* asym = var->add_flag("--asymptotic", vargs.asymptotic, "leading large-intensity term");
  auto* second = var->add_flag("--second-moment", vargs.second_moment);
  asym->excludes(second);
  var->add_option("--format", vargs.format)->check(CLI::IsMember({"text", "json", "csv"}));

  SimulateArgs sargs;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo k-hop counts");
  sim->add_option("--k", sargs.k)->required();
  sim->add_option("--r", sargs.r);
  sim->add_option("--t", sargs.t)->required();
  sim->add_option("--lambda", sargs.lambda, "one intensity or one per cell")->delimiter(',')->required();
  sim->add_option("--samples", sargs.samples)->required();
  sim->add_option("--seed", sargs.seed);
  sargs.threads_opt = sim->add_option("--threads", sargs.threads, "0: all cores; default KHOP_THREADS");
  sim->add_option("--emit-samples", sargs.emit, "write raw counts to this path");
  sim->add_option("--format", sargs.format)->check(CLI::IsMember({"json", "text"}));

  CltArgs targs;
  auto* clt = app.add_subcommand("clt", "distance-to-normal rate experiment");
  clt->add_option("--k", targs.k)->required();
  clt->add_option("--r", targs.r);
  clt->add_option("--t", targs.t)->required();
  clt->add_option("--lambdas", targs.lambdas)->delimiter(',');
  clt->add_option("--samples", targs.samples);
  clt->add_option("--seed", targs.seed);
  clt->add_option("--out", targs.out_path, "CSV path; stdout when omitted");
  targs.threads_opt = clt->add_option("--threads", targs.threads);
  targs.synthetic_opt = clt->add_option("--synthetic", targs.synthetic, "replace simulation by distances C/sqrt(lambda)");

  std::string suite = "all";
  unsigned check_threads = 0;
  auto* chk = app.add_subcommand("check", "run the verification suites");
  chk->add_option("--suite", suite)->check(CLI::IsMember({"tables", "oracles", "bounds", "mc", "all"}));
  auto* chk_threads = chk->add_option("--threads", check_threads);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.back()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.back()->help());
    return 2;
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "moments") return poly_command(false, margs, out, err);
    if (name == "cumulants") return poly_command(true, cargs, out, err);
    if (name == "variance") return variance_command(vargs, out);
    if (name == "simulate") return simulate_command(sargs, out);
    if (name == "clt") return clt_command(targs, out);
    return check_command(suite, thread_count(chk_threads, check_threads), out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace khop
