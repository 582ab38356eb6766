"""Exact moments and cumulants of k-hop counts in the 1D Poisson unit-disk graph."""

from fractions import Fraction

from . import _khop
from ._khop import check, ks_distance, normal_cdf, run_cli, wasserstein1

__all__ = [
    "check",
    "cumulant",
    "cumulant_poly",
    "ks_distance",
    "moment",
    "moment_poly",
    "normal_cdf",
    "run_cli",
    "simulate",
    "variance",
    "variance_general",
    "wasserstein1",
]


def _strs(values):
    return [str(Fraction(v)) for v in values]


def moment_poly(k, powers, lambdas=()):
    return _khop.moment_poly(k, list(powers), _strs(lambdas))


def cumulant_poly(k, powers, lambdas=()):
    return _khop.cumulant_poly(k, list(powers), _strs(lambdas))


def moment(k, powers, taus, lambdas):
    """Exact joint moment at ascending taus."""
    return Fraction(_khop.moment_value(k, list(powers), _strs(taus), _strs(lambdas)))


def cumulant(k, powers, taus, lambdas):
    return Fraction(_khop.cumulant_value(k, list(powers), _strs(taus), _strs(lambdas)))


def variance(k, lam, tau):
    return Fraction(_khop.variance_equal(k, str(Fraction(lam)), str(Fraction(tau))))


def variance_general(k):
    return _khop.variance_general(k)


def simulate(k, t, lambdas, samples, r=1, seed=0, threads=1):
    """Raw k-hop counts in sample order."""
    if not isinstance(lambdas, (list, tuple)):
        lambdas = [lambdas]
    return _khop.simulate(k, str(Fraction(r)), str(Fraction(t)), _strs(lambdas), samples, seed, threads)
