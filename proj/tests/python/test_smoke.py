from fractions import Fraction
import math

import khop


def test_table_forms():
    assert khop.moment_poly(2, [1, 1], [1]) == "tau1 + tau1*tau2"
    assert khop.variance(5, 1, 1) == Fraction(1, 24) + Fraction(1, 15) + Fraction(1, 24) + Fraction(4, 315)
    assert khop.cumulant(3, [1], [1], [1]) == Fraction(1, 2)
    assert khop.moment(3, [2], ["1/2"], [1, 1]) == Fraction(1, 8) + Fraction(1, 12) + Fraction(1, 64)


def test_general_variance_string():
    assert khop.variance_general(2) == "lambda1*tau"


def test_simulation_is_reproducible():
    a = khop.simulate(3, 2, 1, 5000, seed=4, threads=1)
    b = khop.simulate(3, 2, 1, 5000, seed=4, threads=4)
    assert a == b
    assert abs(sum(a) / len(a) - 0.5) < 4 * math.sqrt(7 / 6 / len(a))


def test_distances():
    assert khop.normal_cdf(0.0) == 0.5
    assert abs(khop.ks_distance([0.0]) - 0.5) < 1e-15
    assert abs(khop.wasserstein1([0.0]) - math.sqrt(2 / math.pi)) < 1e-12


def test_cli_round_trip():
    code, out, err = khop.run_cli(["variance", "--k", "3", "--lambda", "1", "--tau", "1"])
    assert code == 0 and out == "7/6\n" and err == ""
    code, _, err = khop.run_cli(["moments", "--bogus"])
    assert code == 2 and "error" in err


def test_check_criterion():
    ok, detail = khop.check(3)
    assert ok, detail
