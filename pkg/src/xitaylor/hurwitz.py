"""Convergence of Hurwitz zeros of T_{2n-2}(lambda z) to zeros of f.

For a zero s = i t_j of f the Hurwitz root is located directly: T(i t) is
a real even polynomial in t, so a real Newton iteration started at t_j
converges to the nearby root without solving for all 2n-2 roots.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import mpmath

from .errors import ConsistencyError, PrecisionError
from .phase import lambda_of_n
from .specfun import PrecisionContext, ap_str, lambert_w0
from .xi import TaylorPolynomial, eval_taylor_deriv, log_f_real_derivs

__all__ = [
    "HurwitzCell",
    "ConvergenceReport",
    "hurwitz_root",
    "convergence_bound",
    "small_factor_log",
    "rho_and_r",
    "f_lambda_asymptotic_log",
    "convergence_sweep",
    "table2",
    "TABLE2_REFERENCE",
]

# reference values, used only for side-by-side output
TABLE2_REFERENCE = {
    1: "3.4293e-34", 2: "6.9534e-32", 3: "1.4748e-30", 4: "9.8245e-26",
    5: "6.3374e-24", 6: "7.1106e-21", 7: "1.5374e-18", 8: "6.5531e-17",
    9: "3.6990e-13", 10: "6.4702e-12", 11: "5.2363e-6",
}


@dataclass
class HurwitzCell:
    n: int
    j: int
    t: mpmath.mpf
    lam: mpmath.mpf
    z_hurwitz: mpmath.mpc
    abs_err: mpmath.mpf
    bound: mpmath.mpf
    rho: mpmath.mpf
    r_ns: mpmath.mpf
    resolvable: bool = True

    def to_dict(self, ctx) -> dict:
        return {
            "n": self.n, "j": self.j,
            "t": ap_str(self.t, ctx), "lambda": ap_str(self.lam, ctx),
            "z_re": ap_str(mpmath.re(self.z_hurwitz), ctx), "z_im": ap_str(mpmath.im(self.z_hurwitz), ctx),
            "abs_err": mpmath.nstr(self.abs_err, 12), "bound": mpmath.nstr(self.bound, 12),
            "rho": mpmath.nstr(self.rho, 12), "r_ns": mpmath.nstr(self.r_ns, 12),
            "resolvable": self.resolvable,
        }


@dataclass
class ConvergenceReport:
    cells: list
    ctx: PrecisionContext
    constant: float = float("nan")
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"cells": [c.to_dict(self.ctx) for c in self.cells], "constant": self.constant,
                           **self.meta}, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["n", "j", "t", "lambda", "z_re", "z_im", "abs_err", "bound", "rho", "r_ns", "resolvable"]
        w.writerow(cols)
        for c in self.cells:
            d = c.to_dict(self.ctx)
            w.writerow([d[k] for k in cols])
        return buf.getvalue()


def _poly_it(T: TaylorPolynomial, n: int, t):
    """T_{2n-2}(i t) and its t-derivative; real for real t."""
    p = mpmath.mpf(0)
    dp = mpmath.mpf(0)
    u = -t * t
    for m in range(n - 1, -1, -1):
        dp = dp * u + p
        p = p * u + T.coeffs[2 * m]
    # d/dt p(u) = p'(u) * (-2t)
    return p, -2 * t * dp


def hurwitz_root(T: TaylorPolynomial, n: int, t_guess, tol_digits: int | None = None):
    """Real root t of T_{2n-2}(i t) near ``t_guess`` (unscaled s-plane ordinate)."""
    with T.ctx.work():
        t = mpmath.mpf(t_guess)
        tol = mpmath.mpf(10) ** (-(tol_digits or T.ctx.dps) + 3)
        prev = None
        for it in range(200):
            p, dp = _poly_it(T, n, t)
            if dp == 0:
                raise ConsistencyError("vanishing derivative: multiple Hurwitz root suspected")
            step = p / dp
            # once the step stops shrinking it is rounding noise
            if prev is not None and it > 3 and abs(step) > prev / 2 and abs(step) < mpmath.mpf(10) ** (-T.ctx.digits / 2) * abs(t):
                return t
            t -= step
            if abs(step) <= tol * abs(t):
                p, dp = _poly_it(T, n, t)
                return t - p / dp
            prev = abs(step)
        raise ConsistencyError(f"Newton iteration for the Hurwitz root near {mpmath.nstr(t_guess, 10)} failed")


def convergence_bound(n: int, lam, s_abs, m: int = 1, ctx: PrecisionContext | None = None):
    """exp[-(2n/m)(log(lam/|s|) - 1 + 1/W - 7W/(8n) + log(n)/(4n))], W = W(2n/pi)."""
    ctx = ctx or PrecisionContext(30)
    with ctx.work():
        W = lambert_w0(2 * mpmath.mpf(n) / mpmath.pi, ctx)
        e = (mpmath.log(lam / s_abs) - 1 + 1 / W - 7 * W / (8 * n) + mpmath.log(n) / (4 * n))
        return mpmath.exp(-2 * mpmath.mpf(n) / m * e)


def small_factor_log(n: int, lam, s_abs, ctx: PrecisionContext):
    """log |s^{2n} f(lambda) / (lambda^{2n} sqrt n)| evaluated exactly."""
    with ctx.work():
        logf = log_f_real_derivs(lam, ctx)[0]
        return 2 * n * mpmath.log(s_abs) + logf - 2 * n * mpmath.log(lam) - mpmath.log(n) / 2


def f_lambda_asymptotic_log(lam):
    """(lam/2) log(lam/(2 pi e)) + (7/4) log(lam/(2 pi)) + log(2 sqrt(2) pi^2), up to O(1/lam)."""
    return lam / 2 * mpmath.log(lam / (2 * mpmath.pi * mpmath.e)) + mpmath.mpf(7) / 4 * mpmath.log(
        lam / (2 * mpmath.pi)) + mpmath.log(2 * mpmath.sqrt(2) * mpmath.pi**2)


def rho_and_r(n: int, s, m: int, ctx: PrecisionContext, T: TaylorPolynomial, lam=None):
    """rho(n) = |s^{2n} f(lambda)/(lambda^{2n} sqrt n)|^{1/m} and
    r_{n,s} = log lambda - log|s| - (1/n) log(m!/|f^{(m)}(s)|).

    f^{(m)}(s) comes from termwise differentiation of the Taylor data ``T``.
    """
    with ctx.work():
        lam = lam if lam is not None else lambda_of_n(n, ctx).lam
        s = mpmath.mpmathify(s)
        log_rho = small_factor_log(n, lam, abs(s), ctx) / m
        dm = abs(eval_taylor_deriv(T, s, m))
        if dm < mpmath.mpf(10) ** (-ctx.digits / 2):
            raise PrecisionError(f"|f^({m})(s)| = {mpmath.nstr(dm, 3)} is too small to resolve")
        r = mpmath.log(lam) - mpmath.log(abs(s)) - mpmath.log(mpmath.factorial(m) / dm) / n
        return mpmath.exp(log_rho), r


def convergence_sweep(j_values, n_values, ctx: PrecisionContext, T: TaylorPolynomial, zeta_ordinates) -> ConvergenceReport:
    """|lambda z_H - i t_j| across n for each zero index j, with the bound and rho.

    ``T`` must have degree >= 2 max(n) - 2 and precision to spare; cells whose
    error is below what the coefficients resolve are marked unresolvable.
    """
    ts = sorted(zeta_ordinates)
    cells = []
    resolvable_floor = mpmath.mpf(10) ** (-T.ctx.digits + 10)
    for n in n_values:
        sc = lambda_of_n(n, ctx)
        Tn = T.truncate(2 * n - 2)
        for j in j_values:
            t = ts[j - 1]
            with T.ctx.work():
                t_hi = mpmath.mpf(t)
                root = hurwitz_root(Tn, n, t_hi)
                err = abs(root - t_hi)
                gap = min(abs(t_hi - u) for u in ts if u != t) if len(ts) > 1 else t_hi
                if err > gap / 4:
                    raise ConsistencyError(f"Hurwitz root for j={j}, n={n} wandered to another zero")
            with ctx.work():
                rho, r = rho_and_r(n, 1j * t_hi, 1, ctx, T, lam=sc.lam)
                bound = convergence_bound(n, sc.lam, t_hi, 1, ctx)
                cells.append(HurwitzCell(
                    n=n, j=j, t=t_hi, lam=sc.lam, z_hurwitz=1j * root / sc.lam, abs_err=+err,
                    bound=bound, rho=rho, r_ns=r, resolvable=err > resolvable_floor * t_hi,
                ))
    ratios = [c.abs_err / c.bound for c in cells if c.resolvable and c.bound > 0]
    const = float(max(ratios)) if ratios else float("nan")
    return ConvergenceReport(cells=cells, ctx=ctx, constant=const)


def table2(T: TaylorPolynomial, zeta_ordinates, n: int = 102, count: int = 11, ctx: PrecisionContext | None = None):
    """Rows (k, |lambda z_k - i t_k|) for the first ``count`` zeros at degree 2n-2."""
    ctx = ctx or PrecisionContext(30)
    rep = convergence_sweep(range(1, count + 1), [n], ctx, T, zeta_ordinates)
    return [(c.j, c.abs_err, c) for c in rep.cells]
