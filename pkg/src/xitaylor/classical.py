"""Partial sums of exp and cosh: the validation track.

exp sums are T_{n-1}(e^z; n z) (degree n - 1, scale n) and cosh sums are
T_n(cosh z; (n + 1) z) (degree n, scale n + 1). Their roots are compared with
the Szegő curve |z e^{1-z}| = 1, its first correction, and the zeros of
cosh((n + 1) z).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import mpmath

from .curves import exp_curve_xrange, exp_curve_y
from .errors import PrecisionError
from .polyroots import aberth
from .specfun import PrecisionContext

__all__ = [
    "PartialSum",
    "roots_partial_sum",
    "table1",
    "table1_csv",
    "TABLE1_REFERENCE",
    "curve_distance",
    "ScalingReport",
    "szego_distance_scaling",
    "fit_exponent",
]

TABLE1_REFERENCE = {
    1: "6.4203e-343", 2: "1.5341e-246", 3: "9.9742e-202", 4: "3.2819e-172",
    5: "3.6516e-150", 6: "1.4648e-132", 7: "6.6037e-118", 8: "2.3563e-105",
    9: "2.2431e-94", 10: "1.2781e-84", 11: "7.6667e-76", 12: "7.2966e-68",
    13: "1.4982e-60", 14: "8.4059e-54", 15: "1.5514e-47", 16: "1.0925e-41",
    17: "3.3118e-36", 18: "4.7719e-31", 19: "3.5500e-26", 20: "1.4618e-21",
    21: "3.5351e-17", 22: "5.2813e-13", 23: "5.0926e-9", 24: "3.2346e-5",
}


@dataclass(frozen=True)
class PartialSum:
    kind: str
    degree: int
    scale: int

    def __post_init__(self):
        if self.kind not in ("exp", "cosh"):
            raise ValueError(f"unknown partial sum kind {self.kind!r}")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.kind == "cosh" and self.degree % 2:
            raise ValueError("cosh partial sums have even degree")

    @classmethod
    def exp(cls, n: int) -> "PartialSum":
        return cls("exp", n - 1, n)

    @classmethod
    def cosh(cls, n: int) -> "PartialSum":
        return cls("cosh", n, n + 1)

    def coeffs(self):
        """Coefficients in z, lowest first (cosh: every other one is zero)."""
        N = mpmath.mpf(self.scale)
        out = []
        for k in range(self.degree + 1):
            if self.kind == "cosh" and k % 2:
                out.append(mpmath.mpf(0))
            else:
                out.append(N**k / mpmath.factorial(k))
        return out

    def needed_digits(self) -> int:
        # the coefficients peak near e^scale; roots near |z| = 1 lose that much
        return int(self.scale / math.log(10)) + 10

    def __call__(self, z):
        return mpmath.polyval(self.coeffs()[::-1], z)


def roots_partial_sum(ps: PartialSum, ctx: PrecisionContext):
    """All ``ps.degree`` roots, sorted by (imag, real).

    cosh sums are solved as polynomials in v = z^2 and unfolded.
    """
    if ps.degree > 512:
        raise ValueError("degree above 512 is not supported")
    dps = max(ctx.dps, ps.needed_digits() + ctx.digits // 2)
    with mpmath.workdps(dps):
        c = ps.coeffs()
        if ps.kind == "cosh":
            res = aberth(c[::2], dps)
            roots = []
            for v in res.roots:
                r = mpmath.sqrt(v)
                if mpmath.im(r) < 0 or (mpmath.im(r) == 0 and mpmath.re(r) < 0):
                    r = -r
                roots += [r, -r]
        else:
            roots = aberth(c, dps).roots
        floor = mpmath.mpf(10) ** (-ctx.digits // 3)
        from .polyroots import relative_residual

        bad = [i for i, z in enumerate(roots) if relative_residual(c, z) > floor]
        if bad:
            raise PrecisionError(f"{len(bad)} partial-sum roots failed the residual check")
        roots.sort(key=lambda z: (float(mpmath.im(z)), float(mpmath.re(z))))
        return roots


def table1(ctx: PrecisionContext, n: int = 200, count: int = 24):
    """|(2k-1) pi/(2(n+1)) - z_k| for the roots of T_n(cosh; (n+1) z) on the upper imaginary axis."""
    if ctx.digits < 400:
        raise PrecisionError("table1 needs at least 400 digits")
    ps = PartialSum.cosh(n)
    roots = roots_partial_sum(ps, ctx)
    with ctx.work():
        tol = mpmath.mpf(10) ** (-ctx.digits // 2)
        axis = sorted((mpmath.im(z) for z in roots if abs(mpmath.re(z)) <= tol and mpmath.im(z) > 0))
        if len(axis) < count:
            raise PrecisionError(f"only {len(axis)} imaginary-axis roots resolved")
        out = []
        for k in range(1, count + 1):
            target = (2 * k - 1) * mpmath.pi / (2 * (n + 1))
            out.append(abs(target - axis[k - 1]))
        return out


def table1_csv(values, ctx: PrecisionContext) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "paper_value", "computed_value", "ratio"])
    for k, v in enumerate(values, start=1):
        ref = mpmath.mpf(TABLE1_REFERENCE[k]) if k in TABLE1_REFERENCE else None
        ratio = mpmath.nstr(v / ref, 8) if ref else ""
        w.writerow([k, TABLE1_REFERENCE.get(k, ""), mpmath.nstr(v, ctx.digits), ratio])
    return buf.getvalue()


# -- distances to the exp curves --------------------------------------------------


def _golden(f, a, b, iters=80):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return min(fc, fd)


def curve_distance(z: complex, degree: int, kind: str, grid: int = 400) -> float:
    """Distance from z (folded into the upper half plane) to the exp curve ``kind``."""
    z = complex(z.real, abs(z.imag))
    left, right = exp_curve_xrange(degree, kind)

    def dist(x):
        if x <= left:
            return abs(z - left)
        y = exp_curve_y(x, degree, kind)
        if y is None:
            return abs(z - complex(x, 0.0))
        return abs(z - complex(x, y))

    xs = [left + (right - left) * (1 - math.cos(math.pi * i / grid)) / 2 for i in range(grid + 1)]
    ds = [dist(x) for x in xs]
    i = min(range(len(ds)), key=ds.__getitem__)
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, grid)]
    return min(ds[i], _golden(dist, a, b))


@dataclass
class ScalingReport:
    n_values: list
    max_dist: dict  # kind -> list of max distances, aligned with n_values
    exponents: dict  # kind -> fitted decay exponent
    near_one: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        kinds = sorted(self.max_dist)
        w.writerow(["n"] + [f"max_dist_{k}" for k in kinds] + ["near_one"])
        for i, n in enumerate(self.n_values):
            near = f"{self.near_one[i]:.10e}" if self.near_one else ""
            w.writerow([n] + [f"{self.max_dist[k][i]:.10e}" for k in kinds] + [near])
        w.writerow(["exponent"] + [f"{self.exponents[k]:.6f}" for k in kinds] + [""])
        return buf.getvalue()


def fit_exponent(ns, ds, log_factor: bool = False) -> float:
    """Least-squares p in d ~ C n^{-p} (times log n if ``log_factor``)."""
    xs = [math.log(n) for n in ns]
    ys = [math.log(d / math.log(n)) if log_factor else math.log(d) for n, d in zip(ns, ds)]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return -sxy / sxx


def szego_distance_scaling(n_values, ctx: PrecisionContext, exclude: float = 0.1) -> ScalingReport:
    """Max distance of the roots of T_{n-1}(e^z; n z) to Dinf and to D1.

    Roots within ``exclude`` of z = 1 are left out of the maxima; their
    distance to Dinf is reported separately as ``near_one``.
    """
    ns = list(n_values)
    if ns != sorted(ns):
        raise ValueError("n_values must be ascending")
    dmax = {"Dinf": [], "D1": []}
    near = []
    for n in ns:
        ps = PartialSum.exp(n)
        roots = [complex(z) for z in roots_partial_sum(ps, ctx) if mpmath.im(z) >= 0]
        far = [z for z in roots if abs(z - 1) > exclude]
        close = [z for z in roots if abs(z - 1) <= exclude]
        for kind in dmax:
            dmax[kind].append(max(curve_distance(z, ps.degree, kind) for z in far))
        near.append(max((curve_distance(z, ps.degree, "Dinf") for z in close), default=float("nan")))
    exps = {"Dinf": fit_exponent(ns, dmax["Dinf"], log_factor=True), "D1": fit_exponent(ns, dmax["D1"])}
    return ScalingReport(n_values=ns, max_dist=dmax, exponents=exps, near_one=near)
