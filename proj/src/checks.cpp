#include "khop/checks.hpp"

#include "khop/cli.hpp"
#include "khop/cltstats.hpp"
#include "khop/hop_cumulants.hpp"
#include "khop/oracles.hpp"
#include "khop/simulator.hpp"
#include "khop/variance.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace khop {

namespace {

const VarRegistry& R = registry();

MultiPoly unit_lambdas(MultiPoly p) {
  p = substitute(p, R.lambda(), 1);
  for (int i = 1; i <= kMaxIndexed; ++i) p = substitute(p, R.lambda(i), 1);
  return p;
}

MultiPoly taus_to(const MultiPoly& p, int n, Var target) {
  std::vector<std::pair<Var, Var>> mapping;
  for (int i = 1; i <= n; ++i) mapping.emplace_back(R.tau(i), target);
  return rename(p, mapping);
}

MultiPoly on_diagonal(const MultiPoly& p, int n) { return taus_to(p, n, R.tau()); }

// Accumulates named sub-checks into one verdict.
struct Tally {
  int total = 0;
  std::vector<std::string> failed;

  void check(bool ok, const std::string& what) {
    ++total;
    if (!ok) failed.push_back(what);
  }

  CriterionResult result(std::string summary = {}) const {
    CriterionResult r;
    r.pass = failed.empty();
    std::ostringstream d;
    d << total - static_cast<int>(failed.size()) << "/" << total << " checks pass";
    if (!summary.empty()) d << "; " << summary;
    if (!failed.empty()) {
      d << "; failed:";
      for (std::size_t i = 0; i < failed.size() && i < 12; ++i) d << (i ? "," : "") << ' ' << failed[i];
      if (failed.size() > 12) d << ", ...";
    }
    r.detail = d.str();
    return r;
  }
};

CriterionResult tables() {
  MomentEngine me;
  CumulantEngine ce;
  Tally t;
  const std::vector<std::string> two_hop_moments{
      "tau1",
      "tau1 + tau1*tau2",
      "tau1 + tau1*tau3 + 2*tau1*tau2 + tau1*tau2*tau3",
      "tau1 + tau1*tau4 + 2*tau1*tau3 + 4*tau1*tau2 + tau1*tau3*tau4 + 2*tau1*tau2*tau4 + 3*tau1*tau2*tau3 + "
      "tau1*tau2*tau3*tau4",
  };
  for (int n = 1; n <= 4; ++n)
    t.check(unit_lambdas(me.flat(2, n)) == parse_poly(two_hop_moments[n - 1]), "two-hop moment n=" + std::to_string(n));

  const std::vector<std::string> three_hop_moments{
      "1/2*tau^2",
      "1/2*tau^2 + 2/3*tau^3 + 1/4*tau^4",
      "1/2*tau^2 + 2*tau^3 + 5/2*tau^4 + tau^5 + 1/8*tau^6",
      "1/2*tau^2 + 14/3*tau^3 + 53/4*tau^4 + 66/5*tau^5 + 67/12*tau^6 + tau^7 + 1/16*tau^8",
  };
  for (int n = 1; n <= 4; ++n)
    t.check(unit_lambdas(collapse(me.moment(3, {n}), R.tau())) == parse_poly(three_hop_moments[n - 1]), "three-hop moment n=" + std::to_string(n));

  const std::vector<std::string> four_hop_moments{
      "1/6*tau^3",
      "1/6*tau^3 + 1/4*tau^4 + 2/15*tau^5 + 1/36*tau^6",
      "1/6*tau^3 + 3/4*tau^4 + 5/4*tau^5 + 59/60*tau^6 + 13/35*tau^7 + 1/15*tau^8 + 1/216*tau^9",
  };
  for (int n = 1; n <= 3; ++n)
    t.check(unit_lambdas(collapse(me.moment(4, {n}), R.tau())) == parse_poly(four_hop_moments[n - 1]), "four-hop moment n=" + std::to_string(n));

  const std::vector<std::string> three_hop_cumulants{
      "1/2*tau^2",
      "1/2*tau^2 + 2/3*tau^3",
      "1/2*tau^2 + 2*tau^3 + 7/4*tau^4",
      "1/2*tau^2 + 14/3*tau^3 + 23/2*tau^4 + 36/5*tau^5",
      "1/2*tau^2 + 10*tau^3 + 215/4*tau^4 + 86*tau^5 + 41*tau^6",
  };
  for (int n = 1; n <= 5; ++n)
    t.check(unit_lambdas(on_diagonal(ce.diagonal(3, n), 1)) == parse_poly(three_hop_cumulants[n - 1]), "three-hop cumulant n=" + std::to_string(n));

  const std::vector<std::string> four_hop_cumulants{
      "1/6*tau^3",
      "1/6*tau^3 + 1/4*tau^4 + 2/15*tau^5",
      "1/6*tau^3 + 3/4*tau^4 + 5/4*tau^5 + 9/10*tau^6 + 69/280*tau^7",
  };
  for (int n = 1; n <= 3; ++n)
    t.check(unit_lambdas(on_diagonal(ce.diagonal(4, n), 1)) == parse_poly(four_hop_cumulants[n - 1]), "four-hop cumulant n=" + std::to_string(n));

  const std::vector<std::string> general_variance{
      "lambda1",
      "1/2*lambda1*lambda2 + 1/3*lambda1^2*lambda2 + 1/3*lambda1*lambda2^2",
      "1/6*lambda1*lambda2*lambda3 + 1/12*lambda1^2*lambda2*lambda3 + 1/12*lambda1*lambda2^2*lambda3 + "
      "1/12*lambda1*lambda2*lambda3^2 + 4/120*lambda1^2*lambda2*lambda3^2 + 6/120*lambda1^2*lambda2^2*lambda3 + "
      "4/120*lambda1*lambda2^2*lambda3^2",
  };
  for (int k = 2; k <= 4; ++k)
    t.check(substitute(variance_general(k), R.tau(), 1) == parse_poly(general_variance[k - 2]), "general variance k=" + std::to_string(k));

  const std::vector<std::string> equal_variance{
      "tau",
      "1/2*tau^2 + 2/3*tau^3",
      "1/6*tau^3 + 1/4*tau^4 + 2/15*tau^5",
      "1/24*tau^4 + 1/15*tau^5 + 1/24*tau^6 + 4/315*tau^7",
      "1/120*tau^5 + 1/72*tau^6 + 1/105*tau^7 + 1/288*tau^8 + 2/2835*tau^9",
  };
  for (int k = 2; k <= 6; ++k)
    t.check(substitute(variance_equal(k), R.lambda(), 1) == parse_poly(equal_variance[k - 2]), "equal-intensity variance k=" + std::to_string(k));
  return t.result();
}

CriterionResult cross_paths() {
  CumulantEngine ce({6, 6});
  MomentEngine& me = ce.moments();
  Tally t;
  for (int k = 2; k <= 4; ++k)
    for (int n = 1; n <= 4; ++n)
      t.check(ce.flat(k, n) == ce.cumulant_from_moments(k, n).poly,
              "recursion vs inversion k=" + std::to_string(k) + " n=" + std::to_string(n));
  for (int k = 2; k <= 5; ++k)
    t.check(equal_lambdas(on_diagonal(ce.flat(k, 2), 2)) == variance_equal(k), "variance vs c2 k=" + std::to_string(k));
  for (int k = 2; k <= 6; ++k)
    t.check(equal_lambdas(variance_general(k)) == variance_equal(k), "general vs equal k=" + std::to_string(k));
  for (auto [k, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {3, 3}, {4, 1}, {4, 2}})
    t.check(moment_via_partitions(k, n) == me.flat(k, n),
            "partition tuples k=" + std::to_string(k) + " n=" + std::to_string(n));
  return t.result();
}

CriterionResult explicit_steps() {
  CumulantEngine ce;
  MomentEngine& me = ce.moments();
  Tally t;
  auto ascending = [](int n) {
    std::vector<Var> v;
    for (int i = 1; i <= n; ++i) v.push_back(R.tau(i));
    return v;
  };
  for (int k = 2; k <= 3; ++k)
    for (int n = 1; n <= 3; ++n)
      t.check(explicit_moment_step(me, k, ascending(n)) == me.flat(k + 1, n),
              "moment step k=" + std::to_string(k) + " n=" + std::to_string(n));
  for (int n = 2; n <= 3; ++n)
    t.check(explicit_cumulant_step(me, 2, ascending(n)) == ce.flat(3, n), "cumulant step n=" + std::to_string(n));
  std::vector<Var> same(4, R.tau(1));
  t.check(explicit_cumulant_step(me, 2, same) == ce.diagonal(3, 4), "cumulant step n=4");
  return t.result();
}

CriterionResult asymptotic() {
  Tally t;
  std::ostringstream s;
  const Rational lambda(10000), tau(1);
  for (int k = 3; k <= 4; ++k) {
    Rational dev = variance_equal(k, lambda, tau) / variance_asymptotic(k, lambda, tau) - 1;
    if (dev < 0) dev = -dev;
    t.check(dev <= make_rational(2, 1000), "k=" + std::to_string(k));
    s << (k == 3 ? "" : ", ") << "k=" << k << " deviation " << shortest_double(to_double(dev));
  }
  return t.result(s.str());
}

CriterionResult bounds() {
  CumulantEngine ce;
  MomentEngine& me = ce.moments();
  Tally t;
  int moment_equal = 0;
  for (int k = 2; k <= 4; ++k)
    for (int n = 1; n <= 4; ++n)
      for (long lam : {1L, 10L})
        for (const Rational& tau : {make_rational(1, 10), make_rational(1, 2), Rational(1)}) {
          const std::string at = "k=" + std::to_string(k) + " n=" + std::to_string(n) + " l=" + std::to_string(lam) +
                                 " t=" + to_string(tau);
          std::vector<Rational> taus(static_cast<std::size_t>(n), tau), lambdas{Rational(lam)};
          Rational m = moment_at(me, k, taus, lambdas).value;
          Rational mb = moment_bound(k, n, lam, tau);
          if (m == mb) ++moment_equal;
          t.check(m < mb, "moment " + at);
          Rational c = diagonal_cumulant_at(ce, k, n, lam, tau);
          if (c < 0) c = -c;
          t.check(c < cumulant_bound(k, n, lam, tau), "cumulant " + at);
        }
  std::string summary;
  if (moment_equal > 0) summary = "moment bound attained with equality at " + std::to_string(moment_equal) + " points";
  return t.result(summary);
}

CriterionResult monte_carlo(const CheckOptions& o) {
  CumulantEngine ce;
  SimConfig c;
  c.k = 3;
  c.r = 1;
  c.t = 2;
  c.lambdas = {1};
  c.n_samples = 100000;
  c.seed = 20240601;
  c.threads = o.threads;
  auto s = run_simulation(c);
  Tally t;
  std::ostringstream d;
  auto z = [](double est, const Rational& exact, double se) { return (est - to_double(exact)) / se; };
  const Rational m = diagonal_cumulant_at(ce, 3, 1, 1, 1), v = diagonal_cumulant_at(ce, 3, 2, 1, 1),
                 k3 = diagonal_cumulant_at(ce, 3, 3, 1, 1);
  t.check(m == make_rational(1, 2) && v == make_rational(7, 6) && k3 == make_rational(17, 4), "exact references");
  double zm = z(to_double(s.mean()), m, s.se_mean()), zv = z(to_double(s.k_statistic(2)), v, s.se_variance()),
         z3 = z(to_double(s.k_statistic(3)), k3, s.se_k3());
  t.check(std::fabs(zm) < 4, "mean");
  t.check(std::fabs(zv) < 4, "variance");
  t.check(std::fabs(z3) < 4, "k3");
  d << "z(mean)=" << shortest_double(zm) << " z(var)=" << shortest_double(zv) << " z(k3)=" << shortest_double(z3);
  return t.result(d.str());
}

CriterionResult lens_vs_brute(const CheckOptions& o) {
  Tally t;
  std::mt19937_64 gen(1234567);
  std::uniform_int_distribution<int> kd(2, 5), ld(0, 300), td(1, 1000);
  int mismatches = 0, nonzero = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    SimConfig c;
    c.k = kd(gen);
    c.lambdas.clear();
    for (int l = 0; l < c.k; ++l) c.lambdas.push_back(make_rational(ld(gen), 100));
    Rational tau = make_rational(td(gen), 1000);
    c.t = c.k - tau;
    auto rng = stream(4242, static_cast<std::uint64_t>(trial));
    auto s = sample_points(c, rng);
    auto lens = count_khops_lens(s, c.k, 1, to_double(tau));
    if (lens != count_khops_bruteforce(s, c.k, 1, to_double(c.t))) ++mismatches;
    nonzero += lens > 0;
  }
  t.check(mismatches == 0, std::to_string(mismatches) + " count mismatches");

  SimConfig p;
  p.k = 2;
  p.t = make_rational(3, 2);
  p.lambdas = {4};
  p.n_samples = 100000;
  p.seed = 99;
  p.threads = o.threads;
  auto stats = run_simulation(p);
  const double mu = 2, N = 100000;
  std::vector<double> obs(10, 0), expct(10, 0);
  for (auto v : stats.counts()) obs[std::min<std::uint64_t>(v, 9)] += 1;
  double pr = std::exp(-mu), tail = 1;
  for (int i = 0; i < 9; ++i) {
    expct[i] = pr * N;
    tail -= pr;
    pr *= mu / (i + 1);
  }
  expct[9] = tail * N;
  double chi2 = 0;
  for (int i = 0; i < 10; ++i) chi2 += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
  const double crit = boost::math::quantile(boost::math::chi_squared(9), 1 - 1e-3);
  t.check(chi2 < crit, "chi-square");
  std::ostringstream d;
  d << nonzero << " of 1000 configurations with positive counts; chi2=" << shortest_double(chi2) << " (9 dof, cutoff "
    << shortest_double(crit) << ")";
  return t.result(d.str());
}

CriterionResult berry_esseen(const CheckOptions& o) {
  RateExperiment e;
  e.k = 3;
  e.r = 1;
  e.t = make_rational(5, 2);
  e.lambdas = {25, 50, 100, 200, 400};
  e.n_samples = 100000;
  e.seed = 8080;
  e.threads = o.threads;
  auto s = run_rate_experiment(e);
  Tally t;
  t.check(s.ks_fit.slope >= -0.65 && s.ks_fit.slope <= -0.35, "KS slope");
  t.check(s.points.back().ks < s.points.front().ks, "KS decreases");
  t.check(s.w1_fit.slope >= -0.65 && s.w1_fit.slope <= -0.35, "W1 slope");
  t.check(s.points.back().w1 < s.points.front().w1, "W1 decreases");
  std::ostringstream d;
  d << "slope_ks=" << shortest_double(s.ks_fit.slope) << " slope_w1=" << shortest_double(s.w1_fit.slope);
  return t.result(d.str());
}

CriterionResult skewness_rate() {
  CumulantEngine ce;
  auto a = skewness(ce, 3, 10000, 1), b = skewness(ce, 3, 40000, 1);
  // ratio^2 = (c3^2 / c2^3)(1e4) / (c3^2 / c2^3)(4e4)
  Rational sq = (a.c3_squared / a.c2_cubed) / (b.c3_squared / b.c2_cubed);
  double ratio = std::sqrt(to_double(sq));
  Tally t;
  t.check(std::fabs(ratio / 2 - 1) <= 0.05, "ratio");
  return t.result("skew ratio " + shortest_double(ratio));
}

CriterionResult determinism() {
  namespace fs = std::filesystem;
  Tally t;
  std::vector<std::string> outputs, dumps;
  const fs::path dir = fs::temp_directory_path() / ("khop_det_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  for (const char* threads : {"1", "2", "8"}) {
    const fs::path dump = dir / (std::string("samples_") + threads + ".txt");
    std::ostringstream out, err;
    int code = run({"simulate", "--k", "3", "--r", "1", "--t", "2.25", "--lambda", "3", "--samples", "50000", "--seed", "17",
                    "--threads", threads, "--emit-samples", dump.string()},
                   out, err);
    t.check(code == 0, std::string("exit code with ") + threads + " threads");
    outputs.push_back(out.str());
    std::ifstream in(dump, std::ios::binary);
    dumps.push_back(std::string(std::istreambuf_iterator<char>(in), {}));
  }
  fs::remove_all(dir);
  t.check(outputs[0] == outputs[1] && outputs[0] == outputs[2], "stdout identical");
  t.check(dumps[0] == dumps[1] && dumps[0] == dumps[2] && !dumps[0].empty(), "sample dump identical");
  return t.result(std::to_string(outputs[0].size()) + " bytes of JSON per run");
}

struct Entry {
  const char* title;
  std::function<CriterionResult(const CheckOptions&)> fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e{
      {"reference polynomials", [](const CheckOptions&) { return tables(); }},
      {"cross-path symbolic equality", [](const CheckOptions&) { return cross_paths(); }},
      {"written-out recursion oracles", [](const CheckOptions&) { return explicit_steps(); }},
      {"asymptotic variance", [](const CheckOptions&) { return asymptotic(); }},
      {"moment and cumulant bounds", [](const CheckOptions&) { return bounds(); }},
      {"Monte Carlo consistency", monte_carlo},
      {"lens DP vs brute force", lens_vs_brute},
      {"Berry-Esseen rate", berry_esseen},
      {"skewness rate", [](const CheckOptions&) { return skewness_rate(); }},
      {"determinism across threads", [](const CheckOptions&) { return determinism(); }},
  };
  return e;
}

}  // namespace

CriterionResult run_criterion(int id, const CheckOptions& options) {
  if (id < 1 || id > kCriterionCount) throw std::out_of_range("no such criterion");
  const auto& entry = entries()[static_cast<std::size_t>(id - 1)];
  auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = entry.fn(options);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = id;
  r.title = entry.title;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<int> suite_criteria(std::string_view suite) {
  if (suite == "tables") return {1, 4, 9};
  if (suite == "oracles") return {2, 3};
  if (suite == "bounds") return {5};
  if (suite == "mc") return {6, 7, 8, 10};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  throw std::invalid_argument("unknown suite: " + std::string(suite));
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << "criterion " << r.id << ' ' << (r.pass ? "PASS" : "FAIL") << ' ' << r.title << " (";
  s.setf(std::ios::fixed);
  s.precision(1);
  s << r.seconds << "s): " << r.detail;
  return s.str();
}

}  // namespace khop
