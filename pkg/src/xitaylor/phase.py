"""Scaling law, phase function and the local objects near the saddle points.

With lambda = lambda(n) the phase

    phi(z) = 2 log z + (1/n) (log f(lambda) - log f(lambda z))

has its stationary points at z = +-1. Branch convention: phi is evaluated at
the representative of z in the closed first quadrant and extended by
phi(-z) = phi(z) and phi(conj z) = conj phi(z). There log f(lambda z) is the
branch that is real on the positive axis; log zeta is continued horizontally
from Re s = 2, where the principal branch is correct.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import mpmath

from .errors import (
    BracketError,
    BranchError,
    DomainError,
    NeighborhoodError,
    PoleError,
    TruncationError,
)
from .specfun import PrecisionContext, ap, ap_str, lambert_w0
from .xi import _xi_product, log_f_real_derivs

__all__ = [
    "ScalingSolution",
    "PhaseContext",
    "Region",
    "lambda_of_n",
    "lambda_seed",
    "log_zeta_continued",
    "log_f",
    "dlog_f",
    "phi",
    "phi_prime",
    "phi_second",
    "phi_second_at_1",
    "w_map",
    "w_inverse",
    "h0",
    "h_quadrature",
    "h_exact",
    "k_hat",
    "k_model",
    "region_classify",
]

HALF = mpmath.mpf(1) / 2


@dataclass(frozen=True)
class ScalingSolution:
    n: int
    lam: mpmath.mpf
    residual_exact: mpmath.mpf
    residual_asymp: mpmath.mpf
    phi2_at_1: mpmath.mpf
    ctx: PrecisionContext

    @property
    def seed(self):
        return lambda_seed(self.n, self.ctx)

    def to_dict(self) -> dict:
        c = self.ctx
        return {
            "n": self.n,
            "lambda": ap_str(self.lam, c),
            "residual_exact": ap_str(self.residual_exact, c),
            "residual_asymp": ap_str(self.residual_asymp, c),
            "phi2_re": ap_str(self.phi2_at_1, c),
            "phi2_im": "0.0",
            "digits": c.digits,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ScalingSolution":
        d = json.loads(text)
        ctx = PrecisionContext(d["digits"])
        with ctx.work():
            return cls(
                n=d["n"],
                lam=mpmath.mpf(d["lambda"]),
                residual_exact=mpmath.mpf(d["residual_exact"]),
                residual_asymp=mpmath.mpf(d["residual_asymp"]),
                phi2_at_1=mpmath.mpf(d["phi2_re"]),
                ctx=ctx,
            )


def lambda_seed(n: int, ctx: PrecisionContext):
    """4n / W(2n/pi)."""
    with ctx.work():
        return 4 * n / lambert_w0(2 * mpmath.mpf(n) / mpmath.pi, ctx)


def lambda_of_n(n: int, ctx: PrecisionContext) -> ScalingSolution:
    """Solve 2 - (lambda/n) d/dlambda log f(lambda) = 0 for lambda > 1.

    The left side decreases in lambda, so the root is bracketed and then
    polished by safeguarded Newton steps.
    """
    n = int(n)
    if n < 8:
        raise BracketError(f"n={n} is below the supported range n >= 8")
    wctx = PrecisionContext(ctx.digits, ctx.guard_digits + 5)
    with wctx.work():
        def g(lam):
            _, d1, d2 = log_f_real_derivs(lam, wctx)
            return 2 - lam * d1 / n, -(d1 + lam * d2) / n

        seed = lambda_seed(n, wctx)
        lo, hi = seed / mpmath.mpf("1.25"), seed * mpmath.mpf("1.25")
        lo = max(lo, mpmath.mpf(1))
        for _ in range(40):
            if g(lo)[0] > 0:
                break
            lo = max(mpmath.mpf(1), lo / 2)
            if lo == 1 and g(lo)[0] <= 0:
                raise BracketError(f"no sign change of the scaling equation above lambda=1 for n={n}")
        else:
            raise BracketError(f"could not bracket lambda(n) for n={n}")
        for _ in range(60):
            if g(hi)[0] < 0:
                break
            hi *= 2
        else:
            raise BracketError(f"could not bracket lambda(n) for n={n}")

        lam = seed if lo < seed < hi else (lo + hi) / 2
        tol = mpmath.mpf(10) ** (-wctx.dps + 5)
        for _ in range(200):
            val, der = g(lam)
            if val > 0:
                lo = lam
            else:
                hi = lam
            step = val / der
            new = lam - step
            if not (lo < new < hi):
                new = (lo + hi) / 2
            if abs(new - lam) <= tol * lam:
                lam = new
                break
            lam = new
        else:
            raise BracketError(f"Newton iteration for lambda(n) stalled at n={n}")

        res = g(lam)[0]
        res_asym = 2 - lam / (2 * n) * mpmath.log(lam / (2 * mpmath.pi))
        phi2 = -2 - lam**2 / n * log_f_real_derivs(lam, wctx)[2]
    with ctx.work():
        return ScalingSolution(n=n, lam=+lam, residual_exact=+res, residual_asymp=+res_asym, phi2_at_1=+phi2, ctx=ctx)


class Region(str, Enum):
    OMEGA = "Omega"
    MHO_MINUS = "MhoMinus"
    MHO_PLUS = "MhoPlus"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class PhaseContext:
    """A scaling solution plus the w-plane radius delta defining B_{+-1,delta}."""

    scaling: ScalingSolution
    delta: float = 0.3

    def __post_init__(self):
        if not 0 < self.delta <= 0.5:
            raise ValueError("delta must lie in (0, 0.5]")

    @property
    def n(self) -> int:
        return self.scaling.n

    @property
    def lam(self):
        return self.scaling.lam

    @property
    def ctx(self) -> PrecisionContext:
        return self.scaling.ctx

    @property
    def c_w(self):
        """Slope of w at z=1: -i sqrt(-phi''(1)/2)."""
        with self.ctx.work():
            return -1j * mpmath.sqrt(-self.scaling.phi2_at_1 / 2)

    @classmethod
    def for_n(cls, n: int, ctx: PrecisionContext, delta: float = 0.3) -> "PhaseContext":
        return cls(lambda_of_n(n, ctx), delta)


# -- log f with a fixed branch ------------------------------------------------


def log_zeta_continued(s, min_abs=mpmath.mpf("1e-12")):
    """log zeta(s) for Im s >= 0, continued along the horizontal path from Re s = 2.

    On the real axis below 1 the value is the limit from the upper half plane.
    Works at the current mpmath precision.
    """
    s = mpmath.mpmathify(s)
    if mpmath.re(s) >= 2:
        return mpmath.log(mpmath.zeta(s))
    t = mpmath.im(s)
    if t < 0:
        raise ValueError("log_zeta_continued expects Im s >= 0")
    target = mpmath.re(s)
    if t == 0:
        if target == 1:
            raise PoleError("zeta has a pole at s=1")
        z = mpmath.zeta(target)
        # zeta < 0 on (0, 1); the limit from above carries arg -pi
        return mpmath.log(z) if z > 0 else mpmath.log(-z) - 1j * mpmath.pi
    # phase tracking needs little precision; the value is recomputed at the end
    with mpmath.workdps(20):
        tt = +mpmath.mpf(t)
        target = +target
        sigma = mpmath.mpf(2)
        arg = mpmath.arg(mpmath.zeta(mpmath.mpc(sigma, tt)))
        h = mpmath.mpf("0.25")
        while sigma > target:
            step = min(h, sigma - target)
            sig2 = sigma - step if step < sigma - target else target
            z2 = mpmath.zeta(mpmath.mpc(sig2, tt))
            if abs(z2) < min_abs:
                raise BranchError(f"zeta nearly vanishes on the continuation path near {sig2}+{tt}i")
            d = mpmath.arg(z2) - arg
            d -= 2 * mpmath.pi * mpmath.nint(d / (2 * mpmath.pi))
            if abs(d) > mpmath.pi / 4 and step > min(mpmath.mpf("1e-6"), tt / 100):
                h = step / 2
                continue
            arg += d
            sigma = sig2
            h = min(h * mpmath.mpf("1.5"), mpmath.mpf("0.25"))
    z = mpmath.zeta(s)
    if z == 0:
        raise BranchError(f"zeta vanishes at {s}")
    val = mpmath.log(z)
    k = mpmath.nint((arg - mpmath.im(val)) / (2 * mpmath.pi))
    return val + 2j * mpmath.pi * k


def log_f(u):
    """log f(u) on the closed first quadrant, current precision; real for u >= 0."""
    u = mpmath.mpmathify(u)
    s = HALF + u
    if mpmath.im(u) == 0 and mpmath.re(u) >= 0:
        # f is positive on the real axis
        return mpmath.log(mpmath.re(_xi_product(s)))
    base = -mpmath.log(2) - s / 2 * mpmath.log(mpmath.pi) + mpmath.loggamma(s / 2) + mpmath.log(s)
    return base + mpmath.log(s - 1) + log_zeta_continued(s)


def _first_quadrant(z):
    """(representative, conjugated?) with the representative in Re >= 0, Im >= 0."""
    z = mpmath.mpmathify(z)
    if mpmath.re(z) < 0 or (mpmath.re(z) == 0 and mpmath.im(z) < 0):
        z = -z
    if mpmath.im(z) < 0:
        return mpmath.conj(z), True
    return z, False


def _log_f_lambda(pc: PhaseContext):
    return log_f_real_derivs(pc.lam, PrecisionContext(pc.ctx.digits, pc.ctx.guard_digits + 5))[0]


def phi(z, pc: PhaseContext):
    """The phase phi(z); phi(1) = 0 and phi is real and negative elsewhere on the positive axis."""
    with pc.ctx.work(extra=5):
        z = ap(z)
        if z == 0:
            raise DomainError("phi has a logarithmic singularity at z=0")
        zr, conj = _first_quadrant(z)
        if zr == 1:
            return mpmath.mpf(0) if not isinstance(z, mpmath.mpc) else mpmath.mpc(0)
        val = 2 * mpmath.log(zr) + (_log_f_lambda(pc) - log_f(pc.lam * zr)) / pc.n
        if conj:
            val = mpmath.conj(val)
    with pc.ctx.work():
        return +val


def re_phi(z, pc: PhaseContext):
    """Re phi(z) = 2 log|z| + (1/n) log|f(lambda)/f(lambda z)|; no branch needed."""
    with pc.ctx.work(extra=5):
        z = ap(z)
        zr, _ = _first_quadrant(z)
        val = 2 * mpmath.log(abs(zr)) + (_log_f_lambda(pc) - mpmath.log(abs(_xi_product(HALF + pc.lam * zr)))) / pc.n
    with pc.ctx.work():
        return +val


def dlog_f(u, order: int = 1):
    """d/du log f and d^2/du^2 log f at u (current precision, no branch issue)."""
    u = mpmath.mpmathify(u)
    s = HALF + u
    if s == 1:
        # 1/(s-1) + zeta'/zeta is regular at the pole; use a symmetric average
        eps = mpmath.mpf(10) ** (-mpmath.mp.dps // 3)
        return (dlog_f(u + eps, order) + dlog_f(u - eps, order)) / 2
    z0, z1, z2 = (mpmath.zeta(s, 1, k) for k in range(3))
    if order == 1:
        return -mpmath.log(mpmath.pi) / 2 + mpmath.psi(0, s / 2) / 2 + 1 / s + 1 / (s - 1) + z1 / z0
    if order == 2:
        return mpmath.psi(1, s / 2) / 4 - 1 / s**2 - 1 / (s - 1) ** 2 + z2 / z0 - (z1 / z0) ** 2
    raise ValueError("order must be 1 or 2")


def phi_prime(z, pc: PhaseContext):
    """phi'(z) = 2/z - (lambda/n) (log f)'(lambda z)."""
    with pc.ctx.work(extra=5):
        z = ap(z)
        if z == 0:
            raise DomainError("phi' has a pole at z=0")
        val = 2 / z - pc.lam / pc.n * dlog_f(pc.lam * z, 1)
    with pc.ctx.work():
        return +val


def phi_second(z, pc: PhaseContext):
    with pc.ctx.work(extra=5):
        z = ap(z)
        if z == 0:
            raise DomainError("phi'' has a pole at z=0")
        val = -2 / z**2 - pc.lam**2 / pc.n * dlog_f(pc.lam * z, 2)
    with pc.ctx.work():
        return +val


def phi_second_at_1(pc: PhaseContext):
    return pc.scaling.phi2_at_1


# -- conformal map near the saddles --------------------------------------------


def in_neighborhood(z, pc: PhaseContext) -> bool:
    """Membership in B_{1,delta} union B_{-1,delta}."""
    with pc.ctx.work():
        z = ap(z)
        if mpmath.re(z) < 0:
            z = -z
        c = abs(pc.c_w)
        # the component near 1: the pre-image of |w| < delta is roughly a disk of radius delta/|c|
        if abs(z - 1) > 2 * pc.delta / c:
            return False
        return abs(phi(z, pc)) < pc.delta**2


def w_map(z, pc: PhaseContext, check: bool = True):
    """w with w^2 = phi(z), w ~ -i sqrt(-phi''(1)/2) (z-1) near 1, and w(-z) = w(z)."""
    with pc.ctx.work():
        z = ap(z)
        if mpmath.re(z) < 0:
            z = -z
        if z == 1:
            return mpmath.mpc(0)
        if check and not in_neighborhood(z, pc):
            raise NeighborhoodError(f"z={mpmath.nstr(z, 8)} is outside B_delta (delta={pc.delta})")
        c = pc.c_w
        lin = c * (z - 1)
        return lin * mpmath.sqrt(phi(z, pc) / lin**2)


def w_inverse(w, pc: PhaseContext, component: int = 1):
    """z in B_{component,delta} with w_map(z) = w, by Newton's method."""
    with pc.ctx.work():
        w = ap(w)
        c = pc.c_w
        z = 1 + w / c
        tol = mpmath.mpf(10) ** (-pc.ctx.dps + 3)
        for _ in range(100):
            wz = w_map(z, pc, check=False)
            if z == 1:
                dw = c
            else:
                dw = phi_prime(z, pc) / (2 * wz) if wz != 0 else c
            step = (wz - w) / dw
            z -= step
            if abs(step) <= tol:
                break
        else:
            raise NeighborhoodError(f"w_inverse did not converge for w={mpmath.nstr(w, 8)}")
        return z if component == 1 else -z


# -- the Cauchy kernel h and its approximations --------------------------------


def h0(z, pc: PhaseContext):
    """Stationary-phase approximation 2 / ((1 - z^2) sqrt(2 pi |phi''(1)|))."""
    with pc.ctx.work():
        z = ap(z)
        if abs(z - 1) <= mpmath.mpf("1e-3") or abs(z + 1) <= mpmath.mpf("1e-3"):
            raise PoleError("h0 has poles at z = +-1")
        return 2 / ((1 - z * z) * mpmath.sqrt(2 * mpmath.pi * abs(pc.scaling.phi2_at_1)))


def _exp_minus_n_phi(u, pc: PhaseContext, log_fl):
    """e^{-n phi(u)} = f(lambda u) / (f(lambda) u^{2n}); entire in Re u > 0."""
    return _xi_product(HALF + pc.lam * u) * mpmath.exp(-log_fl) / u ** (2 * pc.n)


def h_quadrature(z, pc: PhaseContext, abscissa=None, tmax: float = 50.0):
    """h(z) = (sqrt(n)/2 pi) int e^{-n phi(u)} 2u/(u^2 - z^2) dt along u = a + it.

    The two vertical contour lines are folded into one by z -> -z symmetry.
    ``abscissa`` moves the line off Re u = 1 (the integrand is entire in
    Re u > 0), selecting the side of the jump for z near the line.
    """
    ctx = pc.ctx
    with ctx.work():
        z = ap(z)
        a = mpmath.mpf(abscissa) if abscissa is not None else mpmath.mpf(1)
        if abs(abs(mpmath.re(z)) - a) < mpmath.mpf("1e-8"):
            raise ValueError("z lies on the integration line; pass a shifted abscissa")
        log_fl = _log_f_lambda(pc)
        sn = mpmath.sqrt(pc.n)
        cutoff = mpmath.mpf(10) ** (-ctx.digits - 10)

        def integrand(t):
            u = mpmath.mpc(a, t)
            return _exp_minus_n_phi(u, pc, log_fl) * 2 * u / (u * u - z * z)

        width = 2 / sn
        total = mpmath.mpc(0)
        for direction in (1, -1):
            lo = mpmath.mpf(0)
            while True:
                hi = lo + width
                pts = [lo, hi]
                # refine panels containing a near-pole at u = +-z
                for zz in (z, -z):
                    if abs(mpmath.re(zz) - a) < width and lo < direction * mpmath.im(zz) < hi:
                        pts.insert(1, direction * mpmath.im(zz))
                seg = mpmath.quad(lambda t: integrand(direction * t), pts, method="gauss-legendre")
                total += seg
                if abs(_exp_minus_n_phi(mpmath.mpc(a, direction * hi), pc, log_fl)) < cutoff:
                    break
                lo = hi
                if lo > tmax:
                    raise TruncationError(f"integrand has not decayed by |Im u| = {tmax}")
                width = min(width * mpmath.mpf("1.5"), mpmath.mpf(2))
        return sn / (2 * mpmath.pi) * total


def h_exact(z, pc: PhaseContext, taylor):
    """h from the exact identity T(lambda z) = f(lambda z)[chi - e^{n phi} h / sqrt(n)].

    ``taylor`` is a TaylorPolynomial of degree 2n-2. Independent of the
    quadrature; loses digits where T and chi f nearly cancel.
    """
    from .xi import eval_taylor

    with pc.ctx.work():
        z = ap(z)
        chi = 1 if abs(mpmath.re(z)) < 1 else 0
        f_val = _xi_product(HALF + pc.lam * (z if mpmath.re(z) >= 0 else -z))
        T_val = eval_taylor(taylor, pc.lam * z)
        log_fl = _log_f_lambda(pc)
        e = _exp_minus_n_phi(z if mpmath.re(z) >= 0 else -z, pc, log_fl)
        return mpmath.sqrt(pc.n) * e * (chi - T_val / f_val)


# -- the local model -------------------------------------------------------------


def k_hat(s, chi: int = 1):
    """e^{-s^2} (chi - erfc(i s)/2), at the current precision.

    chi = 1 on the side Im s > 0 (the image of |Re z| < 1), 0 on the other.
    """
    s = mpmath.mpmathify(s)
    return mpmath.exp(-s * s) * (chi - mpmath.erfc(1j * s) / 2)


def k_model(z, pc: PhaseContext):
    """k(z) = sqrt(n) khat(sqrt(n) w(z)) for z in B_delta off the contour."""
    with pc.ctx.work():
        z = ap(z)
        w = w_map(z, pc)
        chi = 1 if abs(mpmath.re(z)) < 1 else 0
        return mpmath.sqrt(pc.n) * k_hat(mpmath.sqrt(pc.n) * w, chi)


def region_classify(z, pc: PhaseContext) -> Region:
    with pc.ctx.work():
        rp = re_phi(z, pc)
        if abs(rp) < mpmath.mpf(10) ** (-pc.ctx.digits / 2):
            return Region.BOUNDARY
        if rp > 0:
            return Region.MHO_PLUS
        return Region.OMEGA if abs(mpmath.re(ap(z))) < 1 else Region.MHO_MINUS
