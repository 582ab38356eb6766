#include "khop/cli.hpp"
#include "khop/checks.hpp"
#include "khop/cltstats.hpp"
#include "khop/hop_cumulants.hpp"
#include "khop/simulator.hpp"
#include "khop/variance.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace khop;

namespace {

std::vector<Rational> rationals(const std::vector<std::string>& xs) {
  std::vector<Rational> out;
  for (const auto& x : xs) out.push_back(parse_rational(x));
  return out;
}

MultiPoly with_lambdas(MultiPoly p, int k, const std::vector<std::string>& lambdas) {
  if (!lambdas.empty())
    for (const auto& [v, x] : lambda_assignment(k, rationals(lambdas))) p = substitute(p, v, x);
  return p;
}

std::string at_taus(const MultiPoly& p, const std::vector<std::string>& taus) {
  Assignment at;
  auto values = rationals(taus);
  for (std::size_t i = 0; i < values.size(); ++i) at[registry().tau(static_cast<int>(i) + 1)] = values[i];
  return to_string(eval(p, at));
}

}  // namespace

PYBIND11_MODULE(_khop, m) {
  m.doc() = "Exact moments, cumulants and simulations of k-hop counts";

  m.def(
      "moment_poly",
      [](int k, std::vector<int> powers, std::vector<std::string> lambdas) {
        MomentEngine e;
        return to_string(with_lambdas(e.moment(k, powers).poly, k, lambdas));
      },
      py::arg("k"), py::arg("powers"), py::arg("lambdas") = std::vector<std::string>{});
  m.def(
      "cumulant_poly",
      [](int k, std::vector<int> powers, std::vector<std::string> lambdas) {
        CumulantEngine e;
        return to_string(with_lambdas(e.cumulant(k, powers).poly, k, lambdas));
      },
      py::arg("k"), py::arg("powers"), py::arg("lambdas") = std::vector<std::string>{});
  m.def(
      "moment_value",
      [](int k, std::vector<int> powers, std::vector<std::string> taus, std::vector<std::string> lambdas) {
        MomentEngine e;
        return at_taus(with_lambdas(e.moment(k, powers).poly, k, lambdas), taus);
      },
      py::arg("k"), py::arg("powers"), py::arg("taus"), py::arg("lambdas"));
  m.def(
      "cumulant_value",
      [](int k, std::vector<int> powers, std::vector<std::string> taus, std::vector<std::string> lambdas) {
        CumulantEngine e;
        return at_taus(with_lambdas(e.cumulant(k, powers).poly, k, lambdas), taus);
      },
      py::arg("k"), py::arg("powers"), py::arg("taus"), py::arg("lambdas"));
  m.def("variance_equal", [](int k, const std::string& lambda, const std::string& tau) {
    return to_string(variance_equal(k, parse_rational(lambda), parse_rational(tau)));
  });
  m.def("variance_general", [](int k) { return to_string(variance_general(k)); });

  m.def(
      "simulate",
      [](int k, const std::string& r, const std::string& t, std::vector<std::string> lambdas, std::uint64_t samples,
         std::uint64_t seed, unsigned threads) {
        SimConfig c;
        c.k = k;
        c.r = parse_rational(r);
        c.t = parse_rational(t);
        c.lambdas = rationals(lambdas);
        c.n_samples = samples;
        c.seed = seed;
        c.threads = threads;
        py::gil_scoped_release release;
        return run_simulation(c).counts();
      },
      py::arg("k"), py::arg("r"), py::arg("t"), py::arg("lambdas"), py::arg("samples"), py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def("normal_cdf", &normal_cdf);
  m.def("ks_distance", [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return ks_distance(xs);
  });
  m.def("wasserstein1", [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return wasserstein1(xs);
  });

  m.def("run_cli", [](std::vector<std::string> args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
  m.def("check", [](int id) {
    CriterionResult r;
    {
      py::gil_scoped_release release;
      r = run_criterion(id);
    }
    return py::make_tuple(r.pass, r.detail);
  });
}
