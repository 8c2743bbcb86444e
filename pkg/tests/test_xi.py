import json

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xitaylor.errors import ConsistencyError
from xitaylor.specfun import PrecisionContext
from xitaylor.xi import (
    TaylorPolynomial,
    eval_f,
    eval_taylor,
    eval_taylor_deriv,
    eval_xi,
    load_or_compute_coeffs,
    log_f_real_derivs,
    taylor_coeffs,
    zeta_zero_count,
    zeta_zero_ordinates,
)

C = PrecisionContext(30)

# oracle: mpmath.taylor (numerical differentiation) of the product formula at 60 digits
A0 = "0.497120778188314109912773739685"
A2 = "0.0114859721575727187676249382488"
A4 = "0.000123452018070318006890345791495"
A6 = "0.000000832355481385527072004758725845"


@pytest.fixture(scope="module")
def T40():
    return taylor_coeffs(40, PrecisionContext(50))


def test_xi_special_values():
    with C.work():
        assert eval_xi(0, C) == mpmath.mpf(1) / 2
        assert eval_xi(1, C) == mpmath.mpf(1) / 2
        assert abs(eval_xi(2, C) - mpmath.pi / 6) < mpmath.mpf(10) ** -30


@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=-30, max_value=30))
@settings(max_examples=30, deadline=None)
def test_functional_equation_and_reality(x, y):
    with C.work():
        z = mpmath.mpc(x, y)
        a = eval_xi(z, C)
        # xi(z) = xi(1 - z) is built in for Re z < 1/2; check it across the line
        b = eval_xi(1 - z, C)
        assert abs(a - b) <= mpmath.mpf(10) ** -28 * max(1, abs(a))
        c = eval_xi(mpmath.conj(z), C)
        assert abs(c - mpmath.conj(a)) <= mpmath.mpf(10) ** -28 * max(1, abs(a))


def test_f_even():
    with C.work():
        z = mpmath.mpc("0.3", "4.2")
        assert eval_f(z, C) == eval_f(-z, C)


def test_low_coefficients_against_numerical_differentiation(T40):
    with T40.ctx.work():
        for k, ref in ((0, A0), (2, A2), (4, A4), (6, A6)):
            assert abs(T40.coeffs[k] / mpmath.mpf(ref) - 1) < mpmath.mpf(10) ** -28
        assert all(T40.coeffs[k] == 0 for k in range(1, 41, 2))
        assert all(T40.coeffs[k] > 0 for k in range(0, 41, 2))


def test_coefficients_certified(T40):
    assert T40.agreement_digits >= 50 - 10


def test_taylor_evaluation_converges(T40):
    with T40.ctx.work():
        z = mpmath.mpc("0.2", "1.5")
        assert abs(eval_taylor(T40, z) - eval_f(z, T40.ctx)) < mpmath.mpf(10) ** -30


def test_taylor_derivative_matches_f_prime(T40):
    with T40.ctx.work():
        z = mpmath.mpf("0.7")
        hi = PrecisionContext(90)
        num = mpmath.diff(lambda t: eval_f(t, hi), z)
        assert abs(eval_taylor_deriv(T40, z, 1) - num) < mpmath.mpf(10) ** -30


def test_log_derivatives_against_difference():
    with C.work():
        x = mpmath.mpf(40)
        lf, d1, d2 = log_f_real_derivs(x, C)
        assert abs(lf - mpmath.log(eval_f(x, C))) < mpmath.mpf(10) ** -28 * abs(lf)
        hi = PrecisionContext(80)
        logf = lambda t: mpmath.log(eval_f(t, hi))
        assert abs(d1 - mpmath.diff(logf, x)) < mpmath.mpf(10) ** -25
        with mpmath.workdps(80):
            h = mpmath.mpf(10) ** -15
            central = (logf(x + h) - 2 * logf(x) + logf(x - h)) / h**2
        assert abs(d2 - central) < mpmath.mpf(10) ** -25


def test_json_round_trip(T40):
    T2 = TaylorPolynomial.from_json(T40.to_json())
    assert T2.coeffs == T40.coeffs
    assert T2.degree == 40
    assert json.loads(T2.to_json()) == json.loads(T40.to_json())


def test_truncate(T40):
    T = T40.truncate(20)
    assert T.degree == 20 and T.coeffs == T40.coeffs[:21]
    with pytest.raises(ValueError):
        T40.truncate(60)


def test_bad_degree():
    with pytest.raises(ValueError):
        taylor_coeffs(7, C)


def test_two_radius_check_detects_aliasing():
    # far too few nodes for degree 40, and no doublings allowed
    with pytest.raises(ConsistencyError):
        taylor_coeffs(40, PrecisionContext(40), quad_points=44, max_doublings=0)


def test_cache_round_trip(tmp_path):
    T = load_or_compute_coeffs(20, PrecisionContext(30), cache_dir=tmp_path)
    files = list(tmp_path.glob("xi_coeffs_deg20_d30.json"))
    assert len(files) == 1
    again = load_or_compute_coeffs(12, PrecisionContext(30), cache_dir=tmp_path)
    assert again.coeffs == T.coeffs[:13]


def test_zeta_ordinates_against_mpmath():
    ts = zeta_zero_ordinates(60, C)
    assert len(ts) == 13
    with C.work():
        for j in (1, 11):
            assert abs(ts[j - 1] - mpmath.zetazero(j).imag) < mpmath.mpf(10) ** -28


def test_backlund_count_matches_scan():
    ts = zeta_zero_ordinates(100, C)
    assert zeta_zero_count(100, C) == len(ts) == 29
