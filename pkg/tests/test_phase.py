import json

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xitaylor.errors import BracketError, DomainError, NeighborhoodError, PoleError
from xitaylor.phase import (
    PhaseContext,
    Region,
    ScalingSolution,
    h0,
    h_exact,
    h_quadrature,
    in_neighborhood,
    k_hat,
    k_model,
    lambda_of_n,
    lambda_seed,
    log_zeta_continued,
    phi,
    phi_prime,
    phi_second,
    re_phi,
    region_classify,
    w_inverse,
    w_map,
)
from xitaylor.specfun import PrecisionContext
from xitaylor.xi import eval_taylor, load_or_compute_coeffs

C = PrecisionContext(30)


def test_lambda_102(pc102):
    sc = pc102.scaling
    with C.work():
        assert round(float(sc.lam)) == 133
        # frozen from the Newton solve; cross-checked by the seed and by the residual
        assert abs(sc.lam - mpmath.mpf("132.63487374064996665405058017")) < mpmath.mpf(10) ** -25
        assert abs(sc.phi2_at_1 - mpmath.mpf("-2.6330100667250112202342564410")) < mpmath.mpf(10) ** -25
        assert abs(sc.residual_exact) < mpmath.mpf(10) ** -30
        assert abs(sc.lam - lambda_seed(102, C)) / sc.lam < 0.01


def test_lambda_small_n_rejected():
    with pytest.raises(BracketError):
        lambda_of_n(4, C)


@pytest.mark.parametrize("n", [16, 64, 256])
def test_lambda_solves_its_equation(n):
    from xitaylor.xi import log_f_real_derivs

    sc = lambda_of_n(n, C)
    with C.work():
        d1 = log_f_real_derivs(sc.lam, PrecisionContext(60))[1]
        assert abs(2 - sc.lam * d1 / n) < mpmath.mpf(10) ** -28


def test_scaling_json_round_trip(pc52):
    s = pc52.scaling
    s2 = ScalingSolution.from_json(s.to_json())
    assert s2.lam == s.lam and s2.n == s.n
    assert json.loads(s2.to_json()) == json.loads(s.to_json())


def test_phi_on_real_axis(pc102):
    with C.work():
        assert phi(1, pc102) == 0
        for x in ("0.5", "1.5", "3"):
            v = phi(mpmath.mpf(x), pc102)
            assert mpmath.im(v) == 0 and v < 0
        assert abs(phi(mpmath.mpf("1.5"), pc102) - mpmath.mpf("-0.2578")) < 1e-3


def test_phi_singular_at_zero(pc102):
    with pytest.raises(DomainError):
        phi(0, pc102)


@given(st.floats(min_value=0.05, max_value=2.5), st.floats(min_value=-1.5, max_value=1.5))
@settings(max_examples=15, deadline=None)
def test_phi_symmetries(x, y):
    pc = PhaseContext.for_n(26, C)
    with C.work():
        z = mpmath.mpc(x, y)
        v = phi(z, pc)
        assert abs(phi(-z, pc) - v) < mpmath.mpf(10) ** -25
        assert abs(phi(mpmath.conj(z), pc) - mpmath.conj(v)) < mpmath.mpf(10) ** -25
        assert abs(re_phi(z, pc) - mpmath.re(v)) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize("z", ["0.5+0.3j", "1.2+0.7j", "0.9+0.05j", "2.0+1.0j"])
def test_phi_prime_against_difference(pc102, z):
    with C.work():
        z = mpmath.mpc(complex(z))
        # central differences; phi pins its own precision, so mpmath.diff cannot raise it
        h = mpmath.mpf(10) ** -10
        num = (phi(z + h, pc102) - phi(z - h, pc102)) / (2 * h)
        assert abs(phi_prime(z, pc102) - num) < mpmath.mpf(10) ** -15
        num2 = (phi_prime(z + h, pc102) - phi_prime(z - h, pc102)) / (2 * h)
        assert abs(phi_second(z, pc102) - num2) < mpmath.mpf(10) ** -15


def test_critical_point(pc102):
    with C.work():
        assert abs(phi_prime(1, pc102)) < mpmath.mpf(10) ** -28
        assert abs(phi_second(1, pc102) - pc102.scaling.phi2_at_1) < mpmath.mpf(10) ** -20


def test_log_zeta_continued_consistent():
    with mpmath.workdps(40):
        for s in (mpmath.mpc("0.5", "10"), mpmath.mpc("-3", "25.5"), mpmath.mpc("0.25", "0.001")):
            v = log_zeta_continued(s)
            assert abs(mpmath.exp(v) - mpmath.zeta(s)) < mpmath.mpf(10) ** -35 * abs(mpmath.zeta(s))
        # arg changes continuously as sigma moves left
        a = mpmath.im(log_zeta_continued(mpmath.mpc("0.6", "30")))
        b = mpmath.im(log_zeta_continued(mpmath.mpc("0.5999", "30")))
        assert abs(a - b) < 0.01
        with pytest.raises(PoleError):
            log_zeta_continued(1)


def test_w_map(pc102):
    with C.work():
        for z in (mpmath.mpc("1.05", "0.1"), mpmath.mpc("0.93", "-0.04"), mpmath.mpc("1", "0.15")):
            w = w_map(z, pc102)
            assert abs(w * w - phi(z, pc102)) < mpmath.mpf(10) ** -28
            assert abs(w_inverse(w, pc102) - z) < mpmath.mpf(10) ** -25
            assert abs(w_map(-z, pc102) - w) < mpmath.mpf(10) ** -28
        # imaginary on the real axis; the line Re z = 1 maps to a nearly horizontal curve
        w = w_map(mpmath.mpc(1, "0.1"), pc102)
        assert abs(mpmath.im(w)) < 0.05 * abs(w) and mpmath.re(w) > 0
        assert abs(mpmath.re(w_map(mpmath.mpf("1.1"), pc102))) < mpmath.mpf(10) ** -28
        with pytest.raises(NeighborhoodError):
            w_map(mpmath.mpc("0.3", "0.3"), pc102)


def test_neighborhood(pc102):
    assert in_neighborhood(mpmath.mpf("1.05"), pc102)
    assert in_neighborhood(mpmath.mpf("-1.05"), pc102)
    assert not in_neighborhood(mpmath.mpf("0.5"), pc102)


def test_k_hat_boundary_values_and_ode():
    with mpmath.workdps(40):
        assert abs(k_hat(0, 1) - mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -35
        assert abs(k_hat(0, 0) + mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -35
        for s in (mpmath.mpc("0.3", "0.2"), mpmath.mpc("-1.1", "0.7"), mpmath.mpc("2", "-0.5")):
            for chi in (0, 1):
                lhs = mpmath.diff(lambda t: k_hat(t, chi), s) + 2 * s * k_hat(s, chi)
                assert abs(lhs - 1j / mpmath.sqrt(mpmath.pi)) < mpmath.mpf(10) ** -30


def test_h0_pole(pc102):
    with pytest.raises(PoleError):
        h0(mpmath.mpf("1.0000001"), pc102)


@pytest.mark.parametrize("n", [26, 52, 102, 204])
def test_h_over_h0_at_origin(n):
    pc = PhaseContext.for_n(n, C)
    with C.work():
        r = h_quadrature(0, pc) / h0(0, pc)
        # 1 + O(1/n) with constant about 0.05
        assert 0.02 < abs(r - 1) * n < 0.1


def test_jump_across_contour(pc102):
    """h_left - h_right = sqrt(n) e^{-n phi(z)} for z on Re z = 1."""
    with C.work():
        # larger y makes the jump e^{-n phi} drop below the rounding level of h
        for y in ("0.05", "0.2", "0.5"):
            z = mpmath.mpc(1, y)
            left = h_quadrature(z, pc102, abscissa=mpmath.mpf("1.05"))
            right = h_quadrature(z, pc102, abscissa=mpmath.mpf("0.95"))
            jump = mpmath.sqrt(102) * mpmath.exp(-102 * phi(z, pc102))
            assert abs((left - right) / jump - 1) < mpmath.mpf(10) ** -12


def test_h_quadrature_against_exact_identity():
    # h_exact cancels chi against T/f, losing about n |Re phi| / ln 10 digits, hence 60 digits here
    hi = PrecisionContext(60)
    pc = PhaseContext.for_n(52, hi)
    T = load_or_compute_coeffs(102, PrecisionContext(80))
    with hi.work():
        for z in (mpmath.mpc("0.3", "0.1"), mpmath.mpc("1.4", "0.3")):
            assert abs(h_quadrature(z, pc) / h_exact(z, pc, T) - 1) < mpmath.mpf(10) ** -20


def test_k_model_matches_taylor_locally(pc102, T402):
    """Inside B_delta, T/f = erfc(i sqrt(n) w)/2 - e^{n phi} (h0 + 1/(2 i sqrt(pi) w)) / sqrt(n) + O(n^-3/2)."""
    from xitaylor.xi import eval_f

    T = T402.truncate(202)
    with C.work():
        z = mpmath.mpc("1.02", "0.05")
        ratio = eval_taylor(T, pc102.lam * z) / eval_f(pc102.lam * z, C)
        w = w_map(z, pc102)
        model = mpmath.erfc(1j * mpmath.sqrt(102) * w) / 2
        corr = mpmath.exp(102 * phi(z, pc102)) * (h0(z, pc102) + 1 / (2j * mpmath.sqrt(mpmath.pi) * w)) / mpmath.sqrt(102)
        assert abs(ratio - model) < 0.1 * abs(model)
        # the correction term removes the n^-1/2 error
        assert abs(ratio - model + corr) < 0.2 * abs(ratio - model)
        assert k_model(z, pc102) != 0


def test_region_classify(pc102):
    assert region_classify(mpmath.mpf("0.01"), pc102) == Region.OMEGA
    assert region_classify(mpmath.mpf("1.5"), pc102) == Region.MHO_MINUS
    assert region_classify(mpmath.mpc("1.2", "0.5"), pc102) == Region.MHO_PLUS
    assert region_classify(mpmath.mpc("0.2", "0.6"), pc102) == Region.MHO_PLUS


def test_region_consistent_with_taylor(pc102, T402):
    """Omega: T/f -> 1; Mho-: T/f -> 0; Mho+: |T/f| large."""
    from xitaylor.xi import eval_f

    T = T402.truncate(202)
    with C.work():
        for z, region in ((mpmath.mpc("0.3", "0.1"), Region.OMEGA), (mpmath.mpf("1.5"), Region.MHO_MINUS),
                          (mpmath.mpc("1.2", "0.5"), Region.MHO_PLUS)):
            q = eval_taylor(T, pc102.lam * z) / eval_f(pc102.lam * z, C)
            assert region_classify(z, pc102) == region
            if region == Region.OMEGA:
                assert abs(q - 1) < 1e-3
            elif region == Region.MHO_MINUS:
                assert abs(q) < 1e-3
            else:
                assert abs(q) > 1e3


def test_phase_context_delta_validation(pc102):
    with pytest.raises(ValueError):
        PhaseContext(pc102.scaling, 0.7)
