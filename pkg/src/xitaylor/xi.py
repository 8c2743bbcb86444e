"""Riemann's xi function, f(z) = xi(1/2 + z), and its Maclaurin coefficients.

The coefficients come from trapezoidal Cauchy quadrature on a circle. The
radius is chosen so that the digits lost between the largest value of f on
the circle and the smallest wanted coefficient contribution are balanced
between the low and high ends of the coefficient range. A second circle,
larger by ``ratio``, certifies every coefficient.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import mpmath

from .errors import ConsistencyError
from .specfun import PrecisionContext, ap, ap_parse, ap_str

__all__ = [
    "TaylorPolynomial",
    "eval_xi",
    "eval_f",
    "log_f_real_derivs",
    "taylor_coeffs",
    "eval_taylor",
    "eval_taylor_deriv",
    "load_or_compute_coeffs",
    "zeta_zero_ordinates",
]


def _xi_product(s):
    """xi(s) for Re s >= 1/2 at the current mpmath precision."""
    if s == 1:
        return mpmath.mpf(1) / 2
    d = abs(s - 1)
    extra = 5 + (int(-mpmath.log10(d)) if d < 1 else 0)
    with mpmath.extradps(extra):
        val = (s * (s - 1) / 2) * mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s)
    return +val


def eval_xi(z, ctx: PrecisionContext):
    """xi(z) = (1/2) pi^(-z/2) Gamma(z/2) z (z-1) zeta(z); entire, xi(0)=xi(1)=1/2."""
    with ctx.work():
        z = ap(z)
        if z == 0 or z == 1:
            return mpmath.mpf(1) / 2
        if mpmath.re(z) < mpmath.mpf(1) / 2:
            z = 1 - z
        return _xi_product(z)


def eval_f(z, ctx: PrecisionContext):
    """f(z) = xi(1/2 + z)."""
    with ctx.work():
        z = ap(z)
        if mpmath.re(z) < 0:
            z = -z
        return _xi_product(mpmath.mpf(1) / 2 + z)


def log_f_real_derivs(x, ctx: PrecisionContext):
    """``(log f(x), d/dx log f(x), d^2/dx^2 log f(x))`` for real x > 1/2."""
    with ctx.work():
        x = mpmath.mpf(x)
        s = x + mpmath.mpf(1) / 2
        z0, z1, z2 = (mpmath.zeta(s, 1, k) for k in range(3))
        logf = (
            -mpmath.log(2) - s / 2 * mpmath.log(mpmath.pi) + mpmath.loggamma(s / 2)
            + mpmath.log(s) + mpmath.log(s - 1) + mpmath.log(z0)
        )
        d1 = (
            -mpmath.log(mpmath.pi) / 2 + mpmath.psi(0, s / 2) / 2
            + 1 / s + 1 / (s - 1) + z1 / z0
        )
        d2 = mpmath.psi(1, s / 2) / 4 - 1 / s**2 - 1 / (s - 1) ** 2 + z2 / z0 - (z1 / z0) ** 2
        return logf, d1, d2


@dataclass
class TaylorPolynomial:
    """Maclaurin data of f(z) = xi(1/2+z); ``coeffs[k]`` multiplies z^k."""

    degree: int
    coeffs: list
    radius_used: mpmath.mpf
    quad_points: int
    ctx: PrecisionContext
    agreement_digits: float = float("nan")
    meta: dict = field(default_factory=dict)

    @property
    def even_coeffs(self):
        return self.coeffs[0::2]

    def truncate(self, degree: int) -> "TaylorPolynomial":
        if degree > self.degree:
            raise ValueError(f"have degree {self.degree}, asked for {degree}")
        return TaylorPolynomial(
            degree=degree,
            coeffs=list(self.coeffs[: degree + 1]),
            radius_used=self.radius_used,
            quad_points=self.quad_points,
            ctx=self.ctx,
            agreement_digits=self.agreement_digits,
            meta=dict(self.meta),
        )

    def with_ctx(self, ctx: PrecisionContext) -> "TaylorPolynomial":
        """Same coefficients, reported at a (not larger) precision."""
        if ctx.digits > self.ctx.digits:
            raise ValueError("cannot raise the precision of computed coefficients")
        t = self.truncate(self.degree)
        t.ctx = ctx
        return t

    def to_json(self) -> str:
        ctx = self.ctx
        return json.dumps(
            {
                "degree": self.degree,
                "radius": ap_str(self.radius_used, ctx),
                "digits": ctx.digits,
                "guard_digits": ctx.guard_digits,
                "quad_points": self.quad_points,
                "agreement_digits": self.agreement_digits,
                "coeffs": [ap_str(c, ctx) for c in self.coeffs],
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "TaylorPolynomial":
        d = json.loads(text)
        ctx = PrecisionContext(d["digits"], d.get("guard_digits", 10))
        return cls(
            degree=d["degree"],
            coeffs=[ap_parse(c, ctx) for c in d["coeffs"]],
            radius_used=ap_parse(d["radius"], ctx),
            quad_points=d["quad_points"],
            ctx=ctx,
            agreement_digits=d.get("agreement_digits", float("nan")),
        )


def eval_taylor(T: TaylorPolynomial, z):
    """Horner evaluation in z^2 (odd coefficients are exactly zero)."""
    with T.ctx.work(extra=math.ceil(math.log10(T.degree + 2))):
        z = ap(z)
        u = z * z
        acc = mpmath.mpf(0)
        for c in reversed(T.coeffs[0::2]):
            acc = acc * u + c
        with T.ctx.work():
            return +acc


def eval_taylor_deriv(T: TaylorPolynomial, z, order: int = 1):
    """order-th derivative of the Taylor polynomial, termwise."""
    with T.ctx.work(extra=math.ceil(math.log10(T.degree + 2))):
        z = ap(z)
        acc = mpmath.mpf(0)
        for k in range(T.degree, order - 1, -1):
            c = T.coeffs[k]
            if c == 0:
                acc = acc * z
                continue
            fall = mpmath.ff(k, order)
            acc = acc * z + c * fall
        with T.ctx.work():
            return +acc


# -- coefficient quadrature ---------------------------------------------------


class _LossModel:
    """Digits lost at radius R for coefficient 0 and for the top coefficient.

    Uses log max|f| = log f(R) on |z| = R (positive coefficients) and a
    saddle-point estimate of the top coefficient.
    """

    def __init__(self, degree: int):
        self.ctx = PrecisionContext(20, 5)
        self.degree = degree
        with self.ctx.work():
            self.loga0 = mpmath.log(eval_f(0, self.ctx))
            self.rho = _saddle_radius(degree, self.ctx)
            lf, d1, d2 = log_f_real_derivs(self.rho, self.ctx)
            b = self.rho * d1 + self.rho**2 * d2
            self.loga_d = lf - degree * mpmath.log(self.rho) - mpmath.log(2 * mpmath.pi * b) / 2

    def __call__(self, R):
        with self.ctx.work():
            R = mpmath.mpf(R)
            logM = log_f_real_derivs(R, self.ctx)[0] if R > 1 else mpmath.log(2)
            ln10 = mpmath.log(10)
            l0 = (logM - self.loga0) / ln10
            ld = (logM - self.loga_d - self.degree * mpmath.log(R)) / ln10
            return float(l0), float(ld)


def _saddle_radius(degree, ctx_low):
    """rho with rho * (log f)'(rho) = degree (the coefficient saddle point)."""
    with ctx_low.work():
        g = lambda r: r * log_f_real_derivs(r, ctx_low)[1] - degree
        lo, hi = mpmath.mpf(2), mpmath.mpf(4)
        while g(hi) < 0:
            lo, hi = hi, hi * 2
        for _ in range(40):
            mid = (lo + hi) / 2
            if g(mid) < 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def choose_radius(degree: int, model: "_LossModel | None" = None) -> float:
    """Radius balancing the precision loss at both ends of the coefficient range."""
    if degree <= 4:
        return 4.0
    model = model or _LossModel(degree)
    lo, hi = 1.5, float(model.rho)
    for _ in range(30):
        mid = math.sqrt(lo * hi)
        l0, ld = model(mid)
        if l0 < ld:
            lo = mid
        else:
            hi = mid
    return round(math.sqrt(lo * hi), 3)


def _node_value(args):
    """f on the k-th quadrature node; top level so worker processes can run it."""
    R, j, N, dps = args
    with mpmath.workdps(dps):
        z = mpmath.mpf(R) * mpmath.expjpi(mpmath.mpf(2 * j) / N)
        return _xi_product(mpmath.mpf(1) / 2 + z)


def _circle_coeffs(R, degree, N, dps, workers):
    """Even Maclaurin coefficients from N trapezoid nodes on |z| = R."""
    quarter = N // 4
    jobs = [(R, j, N, dps) for j in range(quarter + 1)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(_node_value, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        vals = [_node_value(a) for a in jobs]
    with mpmath.workdps(dps):
        full = []
        half = N // 2
        for j in range(N):
            jj = j % half
            full.append(vals[jj] if jj <= quarter else mpmath.conj(vals[half - jj]))
        roots = [mpmath.expjpi(mpmath.mpf(-2 * j) / N) for j in range(N)]
        R = mpmath.mpf(R)
        out = []
        for k in range(0, degree + 1, 2):
            acc = mpmath.fsum(full[j] * roots[(j * k) % N] for j in range(N))
            out.append(acc / N / R**k)
        return out


def taylor_coeffs(
    max_degree: int,
    ctx: PrecisionContext,
    radius=None,
    ratio=1.5,
    quad_points: int | None = None,
    workers: int = 1,
    max_doublings: int = 3,
) -> TaylorPolynomial:
    """Maclaurin coefficients a_0..a_max_degree of f(z) = xi(1/2+z).

    Odd coefficients are set to zero. Every even coefficient computed on
    radius r is checked against the one computed on ``ratio * r``; a
    :class:`ConsistencyError` means more nodes or digits are needed.
    """
    if max_degree < 2 or max_degree % 2:
        raise ValueError("max_degree must be an even integer >= 2")
    model = _LossModel(max_degree)
    r1 = float(radius) if radius is not None else choose_radius(max_degree, model)
    r2 = r1 * float(ratio)
    tol_exp = -ctx.digits + ctx.guard_digits

    def dps_for(R):
        l0, ld = model(R) if R > 1 else (0.0, 0.0)
        return ctx.dps + max(0, math.ceil(max(l0, ld))) + 5

    N = quad_points or 8 * max_degree
    N += (-N) % 4
    for _ in range(max_doublings + 1):
        c1 = _circle_coeffs(r1, max_degree, N, dps_for(r1), workers)
        c2 = _circle_coeffs(r2, max_degree, N, dps_for(r2), workers)
        with ctx.work():
            worst = mpmath.mpf(0)
            for a, b in zip(c1, c2):
                worst = max(worst, abs(a - b) / abs(a))
            if worst <= mpmath.mpf(10) ** tol_exp:
                break
        N *= 2
    else:
        raise ConsistencyError(
            f"two-radius check failed: relative disagreement {mpmath.nstr(worst, 5)} "
            f"exceeds 1e{tol_exp} (radius {r1}, {N // 2} nodes)"
        )
    with ctx.work():
        coeffs = []
        for c in c1:
            if abs(mpmath.im(c)) > mpmath.mpf(10) ** tol_exp * abs(c):
                raise ConsistencyError("coefficient has a non-negligible imaginary part")
            coeffs.append(+mpmath.re(c))
            coeffs.append(mpmath.mpf(0))
        coeffs = coeffs[: max_degree + 1]
        if coeffs[0] <= 0:
            raise ConsistencyError("a_0 must be positive")
        agree = float(-mpmath.log10(worst)) if worst > 0 else float(ctx.dps)
    return TaylorPolynomial(
        degree=max_degree,
        coeffs=coeffs,
        radius_used=mpmath.mpf(r1),
        quad_points=N,
        ctx=ctx,
        agreement_digits=agree,
        meta={"radius2": r2},
    )


def default_cache_dir() -> Path:
    env = os.environ.get("XITAYLOR_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "xitaylor"


def load_or_compute_coeffs(
    max_degree: int, ctx: PrecisionContext, cache_dir: Path | str | None = None, workers: int = 1
) -> TaylorPolynomial:
    """Cached :func:`taylor_coeffs`. A cached set of larger degree/digits is truncated."""
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    cache.mkdir(parents=True, exist_ok=True)
    best = None
    for p in sorted(cache.glob("xi_coeffs_deg*_d*.json")):
        try:
            deg, dig = p.stem[len("xi_coeffs_deg"):].split("_d")
            deg, dig = int(deg), int(dig)
        except ValueError:
            continue
        if deg >= max_degree and dig >= ctx.digits:
            if best is None or (deg, dig) < best[0]:
                best = ((deg, dig), p)
    if best is not None:
        T = TaylorPolynomial.from_json(best[1].read_text())
        T = T.truncate(max_degree)
        return T.with_ctx(ctx) if T.ctx.digits > ctx.digits else T
    T = taylor_coeffs(max_degree, ctx, workers=workers)
    path = cache / f"xi_coeffs_deg{max_degree}_d{ctx.digits}.json"
    # unique temporary name: concurrent processes may fill the same cache
    fd, tmp = tempfile.mkstemp(dir=cache, prefix="." + path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(T.to_json())
    os.replace(tmp, path)
    return T


# -- zeros of xi on the critical line --------------------------------------------


def _f_on_axis(t):
    """f(it) = xi(1/2 + it), real for real t (current precision)."""
    return mpmath.re(_xi_product(mpmath.mpc(mpmath.mpf(1) / 2, t)))


def zeta_zero_ordinates(t_max, ctx: PrecisionContext, step=None):
    """Ordinates 0 < t_1 < t_2 < ... <= t_max of zeta zeros on the critical line.

    Located by sign changes of the real function xi(1/2 + it) and refined by
    bracketing root finding. Zeros off the line, or pairs closer than the
    scan step, would be missed; :func:`zeta_zero_count` gives an independent
    count to compare against.
    """
    with ctx.work():
        t_max = mpmath.mpf(t_max)
        out = []
        with mpmath.workdps(20):
            # spacing shrinks like 2 pi / log(t / 2 pi)
            h = mpmath.mpf(step) if step else mpmath.mpf("0.05")
            ts = []
            t = mpmath.mpf(1)
            prev = _f_on_axis(t)
            while t < t_max:
                t2 = min(t + h, t_max)
                cur = _f_on_axis(t2)
                if prev * cur < 0:
                    ts.append((t, t2))
                t, prev = t2, cur
        for a, b in ts:
            root = mpmath.findroot(_f_on_axis, (mpmath.mpf(a), mpmath.mpf(b)), solver="anderson")
            out.append(+root)
        return out


def zeta_zero_count(T, ctx: PrecisionContext):
    """N(T) = theta(T)/pi + 1 + S(T), with S(T) by continuous arg zeta along Im s = T.

    Independent of the sign-change scan; ``T`` must not be a zero ordinate.
    """
    from .phase import log_zeta_continued  # local import: phase depends on this module

    with ctx.work():
        T = mpmath.mpf(T)
        theta = mpmath.im(mpmath.loggamma(mpmath.mpc(mpmath.mpf(1) / 4, T / 2))) - T / 2 * mpmath.log(mpmath.pi)
        S = mpmath.im(log_zeta_continued(mpmath.mpc(mpmath.mpf(1) / 2, T))) / mpmath.pi
        return int(mpmath.nint(theta / mpmath.pi + 1 + S))
