import json

import mpmath
import pytest

from xitaylor.errors import PrecisionError
from xitaylor.hurwitz import (
    TABLE2_REFERENCE,
    convergence_sweep,
    f_lambda_asymptotic_log,
    hurwitz_root,
    rho_and_r,
    small_factor_log,
    table2,
    convergence_bound,
)
from xitaylor.phase import lambda_of_n
from xitaylor.specfun import PrecisionContext
from xitaylor.xi import log_f_real_derivs

C = PrecisionContext(30)

# frozen from three agreeing routes (Newton on T(it), all-roots Aberth, leading-order prediction)
OURS = {1: "9.47e-135", 2: "1.07e-97", 3: "3.67e-81", 4: "4.34e-62", 5: "2.68e-54", 6: "2.91e-41",
        7: "1.48e-32", 8: "8.33e-27", 9: "3.81e-16", 10: "2.52e-12", 11: "5.2361e-6"}


@pytest.fixture(scope="module")
def rows(T402, ordinates300):
    return table2(T402.truncate(202), ordinates300, 102, 11, C)


def test_table2_values(rows):
    assert [k for k, _, _ in rows] == list(range(1, 12))
    for k, err, _ in rows:
        ref = mpmath.mpf(OURS[k])
        assert abs(err / ref - 1) < 0.01


def test_table2_last_row_matches_reference(rows):
    err = rows[10][1]
    assert abs(err / mpmath.mpf(TABLE2_REFERENCE[11]) - 1) < 1e-3


def test_errors_match_leading_order(rows, T402, pc102):
    """|lambda z_k - i t_k| ~ rho |h(s/lambda)| / |f'(s)| with h from quadrature, no Taylor data in h."""
    from xitaylor.phase import h_quadrature
    from xitaylor.xi import eval_taylor_deriv

    for k, err, cell in (rows[0], rows[4], rows[10]):
        with C.work():
            s = 1j * cell.t
            pred = cell.rho * abs(h_quadrature(s / cell.lam, pc102)) / abs(eval_taylor_deriv(T402, s, 1))
            # first-order agreement; the relative gap is O(err) plus O(1/n) in h
            assert abs(err / pred - 1) < 0.05, k
        assert cell.resolvable


def test_hurwitz_root_near_zero(T402, ordinates300):
    T = T402.truncate(202)
    with T.ctx.work():
        t1 = ordinates300[0]
        t = hurwitz_root(T, 102, t1)
        assert abs(t - t1) < mpmath.mpf(10) ** -130


def test_sweep_decreases_with_n(T402, ordinates300):
    rep = convergence_sweep([3], [52, 102, 202], C, T402, ordinates300)
    errs = [c.abs_err for c in rep.cells]
    assert errs[0] > errs[1] > errs[2]
    d = json.loads(rep.to_json())
    assert len(d["cells"]) == 3 and d["cells"][0]["j"] == 3
    assert rep.to_csv().splitlines()[0].startswith("n,j,t,lambda")


def test_rho_and_r(T402, ordinates300):
    n = 102
    sc = lambda_of_n(n, C)
    with C.work():
        s = 1j * mpmath.mpf(ordinates300[0])
        rho, r = rho_and_r(n, s, 1, C, T402, lam=sc.lam)
        assert abs(mpmath.log(rho) - small_factor_log(n, sc.lam, abs(s), C)) < mpmath.mpf(10) ** -25
        # r = log(lambda/|s|) - (1/n) log(1/|f'(s)|) and stays positive for the first zero
        assert 0 < r < mpmath.log(sc.lam)
    with pytest.raises(PrecisionError):
        # |f'(60i)| ~ 1e-20 is below 10^(-digits/2) at 16 digits
        rho_and_r(n, 1j * mpmath.mpf(60), 1, PrecisionContext(16), T402, lam=sc.lam)


def test_f_lambda_asymptotics():
    with C.work():
        for lam in (100, 400):
            exact = log_f_real_derivs(mpmath.mpf(lam), C)[0]
            assert abs(exact - f_lambda_asymptotic_log(mpmath.mpf(lam))) < 5.0 / lam


def test_convergence_bound_monotone():
    with C.work():
        b1 = convergence_bound(52, lambda_of_n(52, C).lam, 14.13)
        b2 = convergence_bound(102, lambda_of_n(102, C).lam, 14.13)
        assert b2 < b1 < 1
