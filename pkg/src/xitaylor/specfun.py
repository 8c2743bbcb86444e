"""Arbitrary-precision special functions.

Everything takes an explicit :class:`PrecisionContext`; nothing reads or
leaves behind a modified global precision. Complex values are ``mpmath.mpc``
("ComplexAP"), reals are ``mpmath.mpf``.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, replace

import mpmath
from mpmath import libmp

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "PrecisionContext",
    "ErfcZero",
    "ap",
    "ap_str",
    "ap_parse",
    "log_gamma",
    "digamma",
    "trigamma",
    "zeta",
    "zeta_derivatives",
    "erfc",
    "lambert_w0",
    "erfc_zero",
    "erfc_zero_seed",
]


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in decimal digits plus internal guard digits."""

    digits: int = 30
    guard_digits: int = 10

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < 16:
            raise ValueError(f"digits must be an integer >= 16, got {self.digits!r}")
        if self.guard_digits < 0:
            raise ValueError("guard_digits must be non-negative")

    @property
    def dps(self) -> int:
        return self.digits + self.guard_digits

    @property
    def eps(self):
        """10^-digits as an mpf at the working precision."""
        with self.work():
            return mpmath.mpf(10) ** (-self.digits)

    def tol(self, exponent: float):
        """10^exponent, e.g. ``ctx.tol(-ctx.digits / 2)``."""
        with self.work():
            return mpmath.mpf(10) ** mpmath.mpf(exponent)

    def work(self, extra: int = 0):
        return mpmath.workdps(self.dps + extra)

    def with_digits(self, digits: int) -> "PrecisionContext":
        return replace(self, digits=int(digits))

    def for_degree(self, degree: int) -> "PrecisionContext":
        """Guard digits sized for degree-``degree`` polynomial evaluation."""
        return replace(self, guard_digits=10 + math.ceil(math.log10(max(degree, 1))))


@dataclass(frozen=True)
class ErfcZero:
    k: int
    value: mpmath.mpc
    seed: mpmath.mpc


def ap(x):
    """Coerce to an mpmath number at the current working precision."""
    return mpmath.mpmathify(x)


def _real_str(x) -> str:
    x = mpmath.mpf(x)
    return libmp.to_str(x._mpf_, libmp.repr_dps(mpmath.mp.prec))


def ap_str(x, ctx: PrecisionContext | None = None) -> str:
    """Decimal string that parses back to the identical binary value.

    Complex values are written ``re,im``.
    """
    cm = ctx.work() if ctx is not None else _nullcontext()
    with cm:
        x = mpmath.mpmathify(x)
        if isinstance(x, mpmath.mpc):
            return f"{_real_str(x.real)},{_real_str(x.imag)}"
        return _real_str(x)


def ap_parse(text: str, ctx: PrecisionContext | None = None):
    cm = ctx.work() if ctx is not None else _nullcontext()
    with cm:
        if "," in text:
            re, im = text.split(",")
            return mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im))
        return mpmath.mpf(text)


@contextmanager
def _nullcontext():
    yield


def _is_nonpositive_integer(z) -> bool:
    z = mpmath.mpmathify(z)
    if isinstance(z, mpmath.mpc):
        if z.imag != 0:
            return False
        z = z.real
    return z <= 0 and z == mpmath.floor(z)


def log_gamma(z, ctx: PrecisionContext):
    """Principal branch of log Gamma (cut along the negative real axis)."""
    with ctx.work():
        z = ap(z)
        if _is_nonpositive_integer(z):
            raise PoleError(f"log_gamma has a pole at {z}")
        return mpmath.loggamma(z)


def digamma(z, ctx: PrecisionContext):
    with ctx.work():
        z = ap(z)
        if _is_nonpositive_integer(z):
            raise PoleError(f"digamma has a pole at {z}")
        return mpmath.psi(0, z)


def trigamma(z, ctx: PrecisionContext):
    with ctx.work():
        z = ap(z)
        if _is_nonpositive_integer(z):
            raise PoleError(f"trigamma has a pole at {z}")
        return mpmath.psi(1, z)


def zeta(s, ctx: PrecisionContext):
    """Riemann zeta function."""
    with ctx.work():
        s = ap(s)
        if s == 1:
            raise PoleError("zeta has a pole at s=1")
        return mpmath.zeta(s)


def zeta_derivatives(s, ctx: PrecisionContext, order: int = 1):
    """``[zeta(s), zeta'(s), ..., zeta^(order)(s)]``."""
    with ctx.work():
        s = ap(s)
        if s == 1:
            raise PoleError("zeta has a pole at s=1")
        return [mpmath.zeta(s, 1, k) for k in range(order + 1)]


def erfc(z, ctx: PrecisionContext):
    with ctx.work():
        return mpmath.erfc(ap(z))


def lambert_w0(x, ctx: PrecisionContext):
    """Real principal branch of Lambert W by Halley iteration.

    Raises :class:`DomainError` for ``x < -1/e``.
    """
    with ctx.work(extra=5):
        x = mpmath.mpf(x)
        branch = -mpmath.exp(-1)
        if x < branch:
            # allow for rounding of a caller-computed -1/e
            if branch - x > mpmath.mpf(10) ** (-ctx.digits):
                raise DomainError(f"lambert_w0 needs x >= -1/e, got {x}")
            x = branch
        if x == 0:
            return mpmath.mpf(0)
        if x == branch:
            return mpmath.mpf(-1)

        if x < -0.25:
            p = mpmath.sqrt(2 * (mpmath.e * x + 1))
            w = -1 + p - p**2 / 3 + 11 * p**3 / 72
        elif x < 3:
            w = mpmath.log1p(x) * 0.8
        else:
            l1 = mpmath.log(x)
            l2 = mpmath.log(l1)
            w = l1 - l2 + l2 / l1

        target = mpmath.mpf(10) ** (-ctx.digits - 2) * abs(x)
        for _ in range(200):
            ew = mpmath.exp(w)
            f = w * ew - x
            if abs(f) <= target:
                break
            wp1 = w + 1
            step = f / (ew * wp1 - (w + 2) * f / (2 * wp1))
            w -= step
        else:
            raise ConvergenceError(f"lambert_w0 did not converge for x={x}")
    with ctx.work():
        return +w


def erfc_zero_seed(k: int, ctx: PrecisionContext):
    """Large-k asymptotic location of the k-th erfc zero in the upper half plane."""
    with ctx.work():
        vs = mpmath.sqrt((k - mpmath.mpf(1) / 8) * mpmath.pi)
        tau = mpmath.log(2 * vs * mpmath.sqrt(2 * mpmath.pi))
        corr3 = (1 - tau + tau**2 / 2) / (16 * vs**3)
        mu = -vs + tau / (4 * vs) - corr3
        nu = vs + tau / (4 * vs) + corr3
        return mpmath.mpc(mu, nu)


def _erfc_newton(z, ctx, maxiter=100, damping=1):
    tol = mpmath.mpf(10) ** (-ctx.dps + 3)
    c = 2 / mpmath.sqrt(mpmath.pi)
    for _ in range(maxiter):
        step = mpmath.erfc(z) / (-c * mpmath.exp(-z * z))
        z -= damping * step
        if abs(step) <= tol * max(1, abs(z)):
            return z
    return None


def erfc_zero(k: int, ctx: PrecisionContext) -> ErfcZero:
    """k-th zero of erfc in the upper half plane, ordered by modulus.

    Newton from the asymptotic seed; a damped restart is the fallback. The
    conjugate of the returned value is also a zero.
    """
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    with ctx.work():
        seed = erfc_zero_seed(k, ctx)
        expected = 2 * mpmath.pi * (k - mpmath.mpf(1) / 8)
        for damping in (1, mpmath.mpf("0.5"), mpmath.mpf("0.25")):
            z = _erfc_newton(+seed, ctx, maxiter=400 if damping != 1 else 100, damping=damping)
            if z is None:
                continue
            # the right zero: |v_k|^2 sits within half a spacing of 2 pi (k - 1/8)
            if z.imag > 0 and abs(abs(z) ** 2 - expected) < mpmath.pi:
                if abs(mpmath.erfc(z)) <= mpmath.mpf(10) ** (-ctx.digits + ctx.guard_digits):
                    return ErfcZero(k=int(k), value=z, seed=seed)
        raise ConvergenceError(f"Newton iteration for erfc zero k={k} failed", [k])
