"""Zeros of the rescaled Taylor polynomial T_{2n-2}(lambda z) and their census.

T is even, so the roots are found as roots v of the degree n-1 polynomial
sum_m a_{2m} lambda^{2m} v^m and mapped back by z = +-sqrt(v). Roots on the
imaginary z-axis are negative real v, which the solver keeps exactly real.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import mpmath

from .curves import G1, G1_prime, LevelCurve, edge_height, level_value, trace
from .errors import ConvergenceError, CoverageError, PrecisionError
from .phase import PhaseContext, ScalingSolution, in_neighborhood, w_inverse
from .polyroots import aberth, relative_residual
from .specfun import PrecisionContext, ap_str, erfc_zero
from .xi import TaylorPolynomial

__all__ = [
    "RootRecord",
    "ZeroSet",
    "ApproxZeroSet",
    "CountReport",
    "scaled_coeffs",
    "find_all_roots",
    "seed_points",
    "approximate_zeros",
    "classify",
    "kcount",
    "local_count",
    "pair_with_alphas",
    "count_report",
    "outside_count_formula",
    "strip_count_formula",
    "rvm_count",
]

HURWITZ, SPURIOUS, LOCAL = "hurwitz", "spurious", "local_model"


@dataclass
class RootRecord:
    z: mpmath.mpc
    residual: mpmath.mpf
    cls: str = "unclassified"
    match: int | None = None


@dataclass
class ZeroSet:
    n: int
    lam: mpmath.mpf
    roots: list
    ctx: PrecisionContext
    meta: dict = field(default_factory=dict)

    def first_quadrant(self, strict_re: bool = False):
        out = []
        for r in self.roots:
            x, y = mpmath.re(r.z), mpmath.im(r.z)
            if y >= 0 and (x > 0 if strict_re else x >= 0):
                out.append(r)
        return out

    def imaginary_axis(self):
        return [r for r in self.roots if mpmath.re(r.z) == 0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "class", "residual", "match_index"])
        for r in self.roots:
            w.writerow([
                ap_str(mpmath.re(r.z), self.ctx),
                ap_str(mpmath.im(r.z), self.ctx),
                r.cls,
                mpmath.nstr(r.residual, 6),
                "" if r.match is None else r.match,
            ])
        return buf.getvalue()

    @staticmethod
    def read_csv_points(text: str):
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            return []
        with mpmath.workdps(max(len(r[k]) for r in rows for k in ("re", "im")) + 5):
            return [(mpmath.mpc(mpmath.mpf(r["re"]), mpmath.mpf(r["im"])), r["class"]) for r in rows]


@dataclass
class ApproxZeroSet:
    n: int
    lam: mpmath.mpf
    alphas: list  # (k, alpha)


@dataclass
class CountReport:
    n: int
    z_outside_measured: int
    z_outside_formula: float
    strip_count_measured: int
    strip_upper_measured: int
    strip_formula: float
    rvm_NT: float
    kminus: int
    kplus: int
    local_count_measured: int
    lam_Y: float

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=1)


def scaled_coeffs(T: TaylorPolynomial, lam, n: int):
    """Coefficients of T_{2n-2}(lambda z) in v = z^2, lowest first."""
    if T.degree < 2 * n - 2:
        raise ValueError(f"need Taylor degree {2 * n - 2}, have {T.degree}")
    with T.ctx.work():
        lam2 = mpmath.mpf(lam) ** 2
        return [T.coeffs[2 * m] * lam2**m for m in range(n)]


def _condition_digits(coeffs, v):
    """Digits of a root v lost to conditioning: log10 (sum |c||v|^k / |v p'(v)|)."""
    p = mpmath.mpf(0)
    dp = mpmath.mpf(0)
    scale = mpmath.mpf(0)
    r = abs(v)
    for c in reversed(coeffs):
        dp = dp * v + p
        p = p * v + c
        scale = scale * r + abs(c)
    den = abs(v * dp)
    return float(mpmath.log10(scale / den)) if den else float("inf")


def find_all_roots(T: TaylorPolynomial, sc: ScalingSolution, ctx: PrecisionContext, seeds=None) -> ZeroSet:
    """All 2n-2 roots of T_{2n-2}(lambda z), residual-certified.

    ``seeds`` are optional z-plane starting points (any quadrant); they only
    accelerate the iteration.
    """
    n = sc.n
    dps = max(ctx.dps, T.ctx.dps)
    coeffs = scaled_coeffs(T, sc.lam, n)
    vseeds = None
    if seeds:
        with mpmath.workdps(dps):
            vs = []
            for s in seeds:
                v = mpmath.mpmathify(s) ** 2
                if all(abs(v - u) > mpmath.mpf("1e-8") * (1 + abs(v)) for u in vs):
                    vs.append(v)
            vseeds = vs[: n - 1]
    res = aberth(coeffs, dps, seeds=vseeds)
    with mpmath.workdps(dps):
        cond = max(_condition_digits(coeffs, v) for v in res.roots)
        limit = mpmath.mpf(10) ** (-ctx.digits / 3)
        recs = []
        for v, rv in zip(res.roots, res.residuals):
            if rv > limit:
                raise PrecisionError(f"root residual {mpmath.nstr(rv, 3)} exceeds 1e-{ctx.digits / 3:.0f}")
            s = mpmath.sqrt(v)
            if mpmath.re(s) == 0 and mpmath.im(s) < 0:
                s = -s
            recs.append(RootRecord(z=+s, residual=rv))
            recs.append(RootRecord(z=-s, residual=rv))
    return ZeroSet(n=n, lam=sc.lam, roots=recs, ctx=ctx,
                   meta={"dps": dps, "condition_digits": cond, "iterations": res.iterations})


def seed_points(pc: PhaseContext, zeta_ordinates=(), alphas: ApproxZeroSet | None = None, erfc_count: int = 0):
    """z-plane seeds: approximate zeros, rescaled zeta zeros and local-model zeros."""
    out = []
    with pc.ctx.work():
        if alphas is not None:
            out += [a for _, a in alphas.alphas]
        out += [1j * mpmath.mpf(t) / pc.lam for t in zeta_ordinates]
        # zeros of erfc(i sqrt(n) w): w = v_k / (i sqrt(n)), both conjugates
        for k in range(1, erfc_count + 1):
            v = erfc_zero(k, pc.ctx).value
            for vv in (v, mpmath.conj(v)):
                w = vv / (1j * mpmath.sqrt(pc.n))
                if abs(w) < pc.delta:
                    out.append(w_inverse(w, pc))
    return out


def approximate_zeros(pc: PhaseContext, curve: LevelCurve | None = None, samples: int = 32) -> ApproxZeroSet:
    """Solutions of G1(alpha) = log n/(2n) + 2 k pi i/n with alpha on D1 inside U."""
    curve = curve or trace("D1", pc, samples)
    ctx = pc.ctx
    with ctx.work():
        lev = level_value("D1", pc)
        pts = curve.points
        ims = [mpmath.im(G1(p, pc)) for p in pts]
        hi_v, lo_v = ims[0], ims[-1]
        step = 2 * mpmath.pi / pc.n
        k_lo = int(mpmath.ceil(lo_v / step))
        k_hi = int(mpmath.floor(hi_v / step))
        out = []
        tol = mpmath.mpf(10) ** (-ctx.dps + 5)
        for k in range(k_lo, k_hi + 1):
            target = lev + 1j * k * step
            # Im G1 decreases along the traced points; interpolate a start
            j = max(i for i in range(len(ims)) if ims[i] >= k * step)
            j = min(j, len(pts) - 2)
            t = (ims[j] - k * step) / (ims[j] - ims[j + 1])
            z = pts[j] + t * (pts[j + 1] - pts[j])
            for _ in range(60):
                step_z = (G1(z, pc) - target) / G1_prime(z, pc)
                z -= step_z
                if abs(step_z) <= tol:
                    break
            else:
                raise ConvergenceError(f"approximate zero k={k} did not converge", [k])
            out.append((k, +z))
        return ApproxZeroSet(n=pc.n, lam=pc.lam, alphas=out)


def _gaps(ts):
    gaps = []
    for j, t in enumerate(ts):
        left = t - ts[j - 1] if j > 0 else 2 * t
        right = ts[j + 1] - t if j + 1 < len(ts) else left
        gaps.append(min(left, right))
    return gaps


def classify(zs: ZeroSet, pc: PhaseContext, zeta_ordinates, y_edge=None) -> ZeroSet:
    """Label each root hurwitz, local_model or spurious (in place; also returned).

    Hurwitz: |Re lambda z| < 1/2 and lambda z within a quarter of the local
    zero gap of +-i t_j; ``match`` is then +-j. Local: inside B_delta.
    """
    ts = sorted(mpmath.mpf(t) for t in zeta_ordinates)
    with pc.ctx.work():
        if y_edge is None:
            y_edge = edge_height(pc)
        if not ts or ts[-1] < pc.lam * y_edge:
            raise CoverageError(
                f"zeta ordinates reach {mpmath.nstr(ts[-1] if ts else 0, 6)}, need lambda*Y = {mpmath.nstr(pc.lam * y_edge, 6)}"
            )
        gaps = _gaps(ts)
        for r in zs.roots:
            r.cls, r.match = SPURIOUS, None
            lz = pc.lam * r.z
            if abs(mpmath.re(lz)) < mpmath.mpf(1) / 2:
                y = mpmath.im(lz)
                for j, (t, g) in enumerate(zip(ts, gaps), start=1):
                    if abs(lz - 1j * mpmath.sign(y) * t) < g / 4:
                        r.cls, r.match = HURWITZ, int(mpmath.sign(y)) * j
                        break
            if r.cls == SPURIOUS and in_neighborhood(r.z, pc):
                r.cls = LOCAL
        zs.meta["y_edge"] = y_edge
        return zs


def kcount(n: int, delta: float):
    """(K-, K+) = floor/ceil(n delta^2/(2 pi) - 3/8), clamped at 0."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    x = mpmath.mpf(n) * mpmath.mpf(delta) ** 2 / (2 * mpmath.pi) - mpmath.mpf(3) / 8
    return max(0, int(mpmath.floor(x))), max(0, int(mpmath.ceil(x)))


def local_count(zs: ZeroSet, pc: PhaseContext) -> int:
    """Number of roots in B_{1,delta}."""
    return sum(1 for r in zs.roots if mpmath.re(r.z) > 0 and in_neighborhood(r.z, pc))


def pair_with_alphas(zs: ZeroSet, az: ApproxZeroSet):
    """Greedy injective nearest pairing of alphas with first-quadrant roots.

    Returns a list of (k, alpha, z, distance).
    """
    cands = [r.z for r in zs.first_quadrant(strict_re=True)]
    pairs = []
    for k, a in az.alphas:
        for i, z in enumerate(cands):
            pairs.append((abs(z - a), k, i))
    pairs.sort(key=lambda t: t[0])
    used_k, used_i, out = set(), set(), []
    for d, k, i in pairs:
        if k in used_k or i in used_i:
            continue
        used_k.add(k)
        used_i.add(i)
        alpha = dict(az.alphas)[k]
        out.append((k, alpha, cands[i], d))
    out.sort(key=lambda t: t[0])
    return out


def _counting_terms(lam, Y):
    x = float(lam) * float(Y) / (2 * math.pi)
    return x, math.log(x), 1 / (4 * math.pi * float(Y))


def outside_count_formula(n: int, lam, Y) -> float:
    """n - x log x + x - log(x)/(4 pi Y) with x = lambda Y/(2 pi)."""
    x, lx, c = _counting_terms(lam, Y)
    return n - x * lx + x - c * lx


def strip_count_formula(lam, Y) -> float:
    """x log x - x + log(x)/(4 pi Y): the upper-half strip count."""
    x, lx, c = _counting_terms(lam, Y)
    return x * lx - x + c * lx


def rvm_count(T) -> float:
    """(T/2pi) log(T/2pi) - T/2pi."""
    x = float(T) / (2 * math.pi)
    return x * math.log(x) - x


def count_report(zs: ZeroSet, pc: PhaseContext, curve: LevelCurve) -> CountReport:
    if curve.kind != "D1":
        raise ValueError("count_report needs the D1 curve")
    with pc.ctx.work():
        Y = curve.y_edge
        edge = 1 / (2 * pc.lam)
        outside = sum(1 for r in zs.roots if mpmath.re(r.z) > edge)
        strip = len(zs.roots) - 2 * outside
        km, kp = kcount(pc.n, pc.delta)
        return CountReport(
            n=pc.n,
            z_outside_measured=outside,
            z_outside_formula=outside_count_formula(pc.n, pc.lam, Y),
            strip_count_measured=strip,
            strip_upper_measured=sum(1 for r in zs.roots if abs(mpmath.re(r.z)) <= edge and mpmath.im(r.z) > 0),
            strip_formula=strip_count_formula(pc.lam, Y),
            rvm_NT=rvm_count(pc.lam * Y),
            kminus=km,
            kplus=kp,
            local_count_measured=local_count(zs, pc),
            lam_Y=float(pc.lam * Y),
        )
