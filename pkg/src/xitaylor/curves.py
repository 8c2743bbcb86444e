"""Level curves of the phase in the first quadrant.

D0 is Re phi = 0. D1 is Re G1 = log(n)/(2n) with G1 = phi + (1/n) log h0.
Between the strip edge x = 1/(2 lambda) and the disk B_{1,delta} both are
graphs y = Y(x), which is how they are traced.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import mpmath

from .errors import BracketError, StallError
from .phase import PhaseContext, h0, in_neighborhood, phi, phi_prime, re_phi
from .specfun import PrecisionContext, ap_str, lambert_w0

__all__ = [
    "LevelCurve",
    "level_value",
    "G1",
    "G1_prime",
    "y_of_x",
    "y_model",
    "trace",
    "edge_height",
    "szego_exp_curves",
    "exp_level",
]

KINDS = ("D0", "D1")


@dataclass
class LevelCurve:
    kind: str
    n: int
    lam: mpmath.mpf
    points: list
    y_edge: mpmath.mpf | None = None
    ctx: PrecisionContext | None = None
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "n", "lambda", "x", "y"])
        lam = ap_str(self.lam, self.ctx) if self.lam is not None else ""
        for p in self.points:
            w.writerow([self.kind, self.n, lam, ap_str(mpmath.re(p), self.ctx), ap_str(mpmath.im(p), self.ctx)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "LevelCurve":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty curve file")
        # parse at the precision the file was written with
        dps = max(len(r[k]) for r in rows for k in ("x", "y", "lambda")) + 5
        with mpmath.workdps(dps):
            lam = mpmath.mpf(rows[0]["lambda"]) if rows[0]["lambda"] else None
            pts = [mpmath.mpc(mpmath.mpf(r["x"]), mpmath.mpf(r["y"])) for r in rows]
        return cls(kind=rows[0]["kind"], n=int(rows[0]["n"]), lam=lam, points=pts)


def level_value(kind: str, pc: PhaseContext):
    if kind == "D0":
        return mpmath.mpf(0)
    if kind == "D1":
        with pc.ctx.work():
            return mpmath.log(pc.n) / (2 * pc.n)
    raise ValueError(f"unknown curve kind {kind!r}")


def G1(z, pc: PhaseContext):
    """phi(z) + (1/n) log h0(z), with arg(h0) continuous in the first quadrant."""
    with pc.ctx.work():
        return phi(z, pc) + mpmath.log(h0(z, pc)) / pc.n


def G1_prime(z, pc: PhaseContext):
    with pc.ctx.work():
        z = mpmath.mpmathify(z)
        return phi_prime(z, pc) + 2 * z / (1 - z * z) / pc.n


def _re_level(z, kind, pc):
    """Re G(z) - level for the curve ``kind``."""
    v = re_phi(z, pc)
    if kind == "D1":
        v += mpmath.log(abs(h0(z, pc))) / pc.n
    return v - level_value(kind, pc)


def _gprime(z, kind, pc):
    return phi_prime(z, pc) if kind == "D0" else G1_prime(z, pc)


def _scan_grid(y_max):
    ys = [mpmath.mpf("1e-4") * 2**k for k in range(8)]  # up to ~0.0128
    y = mpmath.mpf("0.02")
    while y <= y_max:
        ys.append(y)
        y += mpmath.mpf("0.02")
    return ys


def _newton_y(x, y, kind, pc, tol, maxiter=60):
    """Newton in y on Re G(x + iy) = level; d/dy Re G = -Im G'."""
    for _ in range(maxiter):
        z = mpmath.mpc(x, y)
        F = _re_level(z, kind, pc)
        dF = -mpmath.im(_gprime(z, kind, pc))
        if dF == 0:
            return None
        step = F / dF
        y -= step
        if y <= 0:
            return None
        if abs(step) <= tol * max(1, abs(y)):
            return y
    return None


def y_of_x(x, kind: str, pc: PhaseContext, y_max=2.0, check_unique: bool = False):
    """The unique y > 0 with x + iy on the curve ``kind``.

    Brackets by scanning upward in y, bisects at low precision, then
    finishes with Newton's method at the working precision.
    """
    ctx = pc.ctx
    with ctx.work():
        x = mpmath.mpf(x)
        ys = _scan_grid(mpmath.mpf(y_max))
        with mpmath.workdps(20):
            vals = [_re_level(mpmath.mpc(x, y), kind, pc) for y in ys[:1]]
            bracket = None
            changes = 0
            for i in range(1, len(ys)):
                vals.append(_re_level(mpmath.mpc(x, ys[i]), kind, pc))
                if vals[-2] * vals[-1] < 0:
                    changes += 1
                    if bracket is None:
                        bracket = (ys[i - 1], ys[i])
                    if not check_unique:
                        break
            if bracket is None:
                raise BracketError(f"no {kind} crossing above x={mpmath.nstr(x, 8)} for y <= {y_max}")
            if check_unique and changes != 1:
                raise BracketError(f"{changes} {kind} crossings above x={mpmath.nstr(x, 8)}")
            lo, hi = bracket
            flo = _re_level(mpmath.mpc(x, lo), kind, pc)
            for _ in range(30):
                mid = (lo + hi) / 2
                fm = _re_level(mpmath.mpc(x, mid), kind, pc)
                if fm * flo > 0:
                    lo, flo = mid, fm
                else:
                    hi = mid
            y0 = (lo + hi) / 2
        y = _newton_y(x, mpmath.mpf(y0), kind, pc, mpmath.mpf(10) ** (-ctx.dps + 5))
        if y is None or not (bracket[0] <= y <= bracket[1]):
            raise BracketError(f"Newton refinement left the bracket at x={mpmath.nstr(x, 8)}")
        return y


def y_model(x, pc: PhaseContext):
    """Large-n model (8n/(pi lambda)) W((pi lambda/(8n)) e^{-1 + x + (lambda + log n)/(4n)})."""
    with pc.ctx.work():
        n, lam = pc.n, pc.lam
        a = mpmath.pi * lam / (8 * n)
        arg = a * mpmath.exp(-1 + x + (lam + mpmath.log(n)) / (4 * n))
        return lambert_w0(arg, pc.ctx) / a


def edge_height(pc: PhaseContext, kind: str = "D1"):
    """The height of the curve at the strip edge x = 1/(2 lambda)."""
    with pc.ctx.work():
        return y_of_x(1 / (2 * pc.lam), kind, pc)


def _exit_abscissa(kind, pc, x0):
    """x where the curve enters B_{1,delta}, by bisection on membership."""
    with mpmath.workdps(20):
        lo, hi = mpmath.mpf(x0), mpmath.mpf("0.999")
        inside = lambda x: in_neighborhood(mpmath.mpc(x, y_of_x(x, kind, pc)), pc)
        if not inside(hi):
            raise StallError("curve never enters B_{1,delta}; delta too small for this n")
        for _ in range(40):
            mid = (lo + hi) / 2
            if inside(mid):
                hi = mid
            else:
                lo = mid
        return lo


def trace(kind: str, pc: PhaseContext, samples: int = 64) -> LevelCurve:
    """Points of the curve from the strip edge to the entry into B_{1,delta}.

    Uniform steps in x (at most (x_end - x0)/samples) with a tangent
    predictor and a Newton corrector in y; a failed corrector halves the step.
    """
    if samples < 16:
        raise ValueError("samples must be >= 16")
    if kind not in KINDS:
        raise ValueError(f"unknown curve kind {kind!r}")
    ctx = pc.ctx
    with ctx.work():
        x0 = 1 / (2 * pc.lam)
        x_end = _exit_abscissa(kind, pc, x0)
        hmax = (x_end - x0) / samples
        tol = mpmath.mpf(10) ** (-ctx.dps + 5)
        y = y_of_x(x0, kind, pc)
        pts = [mpmath.mpc(x0, y)]
        x, h = x0, hmax
        while x < x_end:
            h = min(h, x_end - x)
            z = pts[-1]
            g = _gprime(z, kind, pc)
            slope = mpmath.re(g) / mpmath.im(g)  # dy/dx = -F_x / F_y
            xn = x + h
            yn = _newton_y(xn, mpmath.im(z) + slope * h, kind, pc, tol)
            if yn is None:
                h /= 2
                if h < mpmath.mpf("1e-12"):
                    raise StallError(f"{kind} continuation stalled at x={mpmath.nstr(x, 10)}")
                continue
            x = xn
            pts.append(mpmath.mpc(x, yn))
            h = min(hmax, 2 * h)
        return LevelCurve(kind=kind, n=pc.n, lam=pc.lam, points=pts, y_edge=mpmath.im(pts[0]), ctx=ctx,
                          meta={"x_end": x_end, "delta": pc.delta})


# -- curves for the exponential partial sums --------------------------------------


def exp_level(z, N: int, kind: str):
    """Defining function (log scale) of Dinf or the N-corrected curve D1 for exp."""
    x, y = z.real, z.imag
    val = 0.5 * math.log(x * x + y * y) + 1 - x
    if kind == "Dinf":
        return val
    return N * val - 0.5 * math.log(2 * math.pi * N) - math.log(abs(1 - z))


def _bisect(f, a, b, iters=200):
    fa = f(a)
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0 or b - a < 1e-16 * max(1.0, abs(m)):
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def exp_curve_y(x: float, n: int, kind: str) -> float | None:
    """Height of the exp curve above abscissa x (None outside the curve's x-range)."""
    if kind == "Dinf":
        v = math.exp(2 * (x - 1)) - x * x
        return math.sqrt(v) if v > 0 else None
    N = n + 1
    f = lambda y: exp_level(complex(x, y), N, "D1")
    # level -> +inf as y -> inf; scan upward for the first crossing
    y, prev = 1e-9, f(1e-9)
    if prev > 0:
        return None
    while y < 3:
        y2 = y * 1.5 if y < 0.01 else y + 0.01
        cur = f(y2)
        if cur > 0:
            return _bisect(f, y, y2)
        y, prev = y2, cur
    return None


def exp_curve_xrange(n: int, kind: str):
    """Real-axis endpoints (left, right) of the curve's graph part."""
    if kind == "Dinf":
        w = -lambert_w0(math.exp(-1), PrecisionContext(20, 0))
        return float(w), 1.0
    N = n + 1
    left = _bisect(lambda x: exp_level(complex(x, 0), N, "D1"), -0.9, -1e-9)
    return left, 1.0


def szego_exp_curves(n: int, kind: str = "Dinf", samples: int = 200) -> LevelCurve:
    """Points on |z e^{1-z}| = 1 (Dinf) or its degree-n correction (D1), upper half.

    D1 uses the scale N = n + 1 of the rescaled partial sum: N log|z e^{1-z}|
    = log(sqrt(2 pi N) |1 - z|).
    """
    if n < 4:
        raise ValueError("n must be >= 4")
    if kind not in ("Dinf", "D1"):
        raise ValueError(f"unknown kind {kind!r}")
    left, right = exp_curve_xrange(n, kind)
    pts = []
    for i in range(samples + 1):
        # cosine spacing resolves both ends of the graph
        x = left + (right - left) * (1 - math.cos(math.pi * i / samples)) / 2
        y = exp_curve_y(x, n, kind)
        if y is not None:
            pts.append(mpmath.mpc(x, y))
    return LevelCurve(kind=kind, n=n, lam=None, points=pts)
