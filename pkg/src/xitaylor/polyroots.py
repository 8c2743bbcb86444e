"""All roots of a polynomial by Aberth–Ehrlich simultaneous iteration.

Coefficients are given lowest degree first. Initial points come from the
Newton polygon of log|c_k| (one circle per hull edge), or from caller
seeds. A cheap low-precision stage is followed by refinement at the target
precision; real-coefficient input gets exact conjugate symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import ConvergenceError

__all__ = ["RootResult", "aberth", "newton_polygon_init", "horner", "relative_residual"]


@dataclass
class RootResult:
    roots: list
    residuals: list
    iterations: int
    dps: int


def horner(coeffs, x):
    """p(x) and p'(x) for coefficients lowest degree first."""
    p = mpmath.mpf(0)
    dp = mpmath.mpf(0)
    for c in reversed(coeffs):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def relative_residual(coeffs, x):
    """|p(x)| / sum |c_k| |x|^k, the backward error of x as a root."""
    p, _ = horner(coeffs, x)
    r = abs(x)
    scale = mpmath.mpf(0)
    for c in reversed(coeffs):
        scale = scale * r + abs(c)
    return abs(p) / scale


def _upper_hull(points):
    hull = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon_init(coeffs):
    """Starting points on circles whose radii come from the Newton polygon."""
    pts = [(k, float(mpmath.log(abs(c)))) for k, c in enumerate(coeffs) if c != 0]
    hull = _upper_hull(pts)
    out = []
    sigma = 0.7
    for (k1, l1), (k2, l2) in zip(hull, hull[1:]):
        m = k2 - k1
        r = math.exp((l1 - l2) / m)
        for j in range(m):
            ang = 2 * math.pi * j / m + 2 * math.pi * k2 / len(coeffs) + sigma
            out.append(mpmath.mpc(r * math.cos(ang), r * math.sin(ang)))
    return out


def _abs_horner(abs_coeffs, r):
    acc = mpmath.mpf(0)
    for c in reversed(abs_coeffs):
        acc = acc * r + c
    return acc


def _aberth_sweeps(coeffs, z, tol, maxiter):
    """Gauss–Seidel Aberth sweeps; returns (roots, converged flags, sweeps).

    A root stops moving once its step is below ``tol`` relative, or once
    |p| is at the rounding-noise level of the evaluation.
    """
    n = len(z)
    done = [False] * n
    abs_c = [abs(c) for c in coeffs]
    noise = 16 * mpmath.eps * (len(coeffs) + 1)
    it = 0
    for it in range(1, maxiter + 1):
        moved = False
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            p, dp = horner(coeffs, zi)
            if p == 0:
                done[i] = True
                continue
            ratio = p / dp if dp != 0 else mpmath.mpf(1)
            s = mpmath.fsum(1 / (zi - z[j]) for j in range(n) if j != i and z[j] != zi)
            corr = ratio / (1 - ratio * s)
            z[i] = zi - corr
            moved = True
            if abs(corr) <= tol * abs(z[i]) or abs(p) <= noise * _abs_horner(abs_c, abs(zi)):
                done[i] = True
        if all(done) or not moved:
            break
    return z, done, it


def _symmetrize(coeffs, z, tol):
    """Enforce conjugate symmetry for real coefficients; None if the pairing fails."""
    reals = [mpmath.re(v) for v in z if abs(mpmath.im(v)) <= tol * abs(v)]
    upper = [v for v in z if mpmath.im(v) > tol * abs(v)]
    lower = [v for v in z if mpmath.im(v) < -tol * abs(v)]
    if len(upper) != len(lower) or len(reals) + 2 * len(upper) != len(z):
        return None
    out = []
    for x in reals:
        # real Newton keeps real roots on the axis
        for _ in range(8):
            p, dp = horner(coeffs, x)
            if dp == 0:
                break
            x -= p / dp
        out.append(mpmath.mpc(x, 0))
    for v in upper:
        out.append(v)
        out.append(mpmath.conj(v))
    # two snapped reals merging signals a near-real conjugate pair
    rs = sorted(mpmath.re(v) for v in out if mpmath.im(v) == 0)
    for a, b in zip(rs, rs[1:]):
        if abs(a - b) <= tol * max(abs(a), abs(b)):
            return None
    return out


def aberth(coeffs, dps: int, seeds=None, low_dps: int | None = None, maxiter: int = 500,
           real_coeffs: bool = True) -> RootResult:
    """All roots of sum_k coeffs[k] x^k.

    ``low_dps`` is the stage-one precision (default: a third of ``dps``,
    at least 30). ``seeds`` replace the Newton-polygon start for as many
    roots as are given. Raises :class:`ConvergenceError` listing unconverged
    indices.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 1:
        return RootResult([], [], 0, dps)
    low_dps = low_dps or max(30, dps // 3)
    with mpmath.workdps(low_dps):
        c_low = [+mpmath.mpmathify(c) for c in coeffs]
        start = newton_polygon_init(c_low)
        if seeds:
            seeds = [mpmath.mpmathify(s) for s in seeds][:deg]
            # keep the polygon points farthest from any seed
            rest = sorted(start, key=lambda p: -min(abs(p - s) for s in seeds))
            start = seeds + rest[: deg - len(seeds)]
        # perturb duplicates so the Aberth sums stay finite
        start = [p * (1 + mpmath.mpf(k + 1) * mpmath.mpf("1e-9") * 1j) for k, p in enumerate(start)]
        z, done, it1 = _aberth_sweeps(c_low, start, mpmath.mpf(10) ** (-low_dps + 5), maxiter)
    with mpmath.workdps(dps):
        c_hi = [+mpmath.mpmathify(c) for c in coeffs]
        z = [+v for v in z]
        z, done, it2 = _aberth_sweeps(c_hi, z, mpmath.mpf(10) ** (-dps + 5), maxiter)
        if not all(done):
            bad = [i for i, d in enumerate(done) if not d]
            raise ConvergenceError(f"Aberth iteration left {len(bad)} roots unconverged", bad)
        if real_coeffs:
            sym = _symmetrize(c_hi, z, mpmath.mpf(10) ** (-dps // 2))
            if sym is not None:
                z = sym
        res = [relative_residual(c_hi, v) for v in z]
        return RootResult(roots=z, residuals=res, iterations=it1 + it2, dps=dps)
