"""Completed L-functions of Dirichlet characters and their Taylor approximants.

Lambda(s) = N^{s/2} prod Gamma_R(s + mu_j) prod Gamma_C(s + eta_k) L(s), and
F(z) = Lambda(1/2 + z). L is evaluated through Hurwitz zeta values,
L(s) = q^{-s} sum_a chi(a) zeta(s, a/q), which is valid in the whole plane.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import mpmath

from .errors import BracketError, ConsistencyError, DomainError, TruncationError
from .specfun import PrecisionContext, ap_str, lambert_w0

__all__ = [
    "LFunctionDescriptor",
    "LScalingSolution",
    "gamma_R",
    "gamma_C",
    "dirichlet_L",
    "dirichlet_series",
    "completed_L",
    "F_L",
    "log_F_real_derivs",
    "lambda_seed_L",
    "lambda_of_n_L",
    "asymptotic_residual_L",
    "taylor_coeffs_L",
    "taylor_rep_L",
    "TaylorRepL",
    "symmetry_residual",
]


@dataclass(frozen=True)
class LFunctionDescriptor:
    N: int
    mu: tuple = ()
    eta: tuple = ()
    modulus: int = 1
    values: tuple = (1,)
    coeff_bound: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("conductor must be a positive integer")
        if len(self.mu) + len(self.eta) < 1:
            raise ValueError("need at least one gamma factor (J + K >= 1)")
        if self.modulus < 1 or len(self.values) != self.modulus:
            raise ValueError("character values must cover one full period")
        object.__setattr__(self, "mu", tuple(self.mu))
        object.__setattr__(self, "eta", tuple(self.eta))
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    @property
    def J(self) -> int:
        return len(self.mu)

    @property
    def K(self) -> int:
        return len(self.eta)

    @property
    def has_pole(self) -> bool:
        # L(s) has a pole at s = 1 exactly when the coefficients have nonzero mean
        return sum(self.values) != 0

    def coefficient(self, k: int) -> int:
        return self.values[k % self.modulus]

    def to_json(self) -> str:
        return json.dumps({
            "N": self.N, "mu": list(self.mu), "eta": list(self.eta),
            "coeff_kind": {"dirichlet_character": {"modulus": self.modulus, "values": list(self.values)}},
            "coeff_bound": self.coeff_bound, "name": self.name,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "LFunctionDescriptor":
        d = json.loads(text)
        kind = d.get("coeff_kind", {})
        if "dirichlet_character" not in kind:
            raise ValueError(f"unsupported coefficient source {sorted(kind)}")
        ch = kind["dirichlet_character"]
        return cls(N=int(d["N"]), mu=tuple(d.get("mu", ())), eta=tuple(d.get("eta", ())),
                   modulus=int(ch["modulus"]), values=tuple(ch["values"]),
                   coeff_bound=float(d.get("coeff_bound", 1.0)), name=d.get("name", ""))

    @classmethod
    def dirichlet_beta(cls) -> "LFunctionDescriptor":
        return cls(N=4, mu=(1,), modulus=4, values=(0, 1, 0, -1), name="dirichlet_beta")

    @classmethod
    def riemann_zeta(cls) -> "LFunctionDescriptor":
        return cls(N=1, mu=(0,), modulus=1, values=(1,), name="zeta")


def gamma_R(s):
    return mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2)


def gamma_C(s):
    return 2 * (2 * mpmath.pi) ** (-s) * mpmath.gamma(s)


def dirichlet_L(s, d: LFunctionDescriptor, ctx: PrecisionContext, derivative: int = 0):
    """L(s) (or its s-derivative) from Hurwitz zeta values."""
    with ctx.work():
        s = mpmath.mpmathify(s)
        q = d.modulus
        if d.has_pole and s == 1:
            raise DomainError("L has a pole at s = 1")
        if s == 1:
            # the 1/(s-1) parts cancel; Z^{(j)}(1) = sum chi(a) (-1)^j gamma_j(a/q)
            Z = lambda j: (-1) ** j * mpmath.fsum(
                d.values[a % q] * mpmath.stieltjes(j, mpmath.mpf(a) / q) for a in range(1, q + 1))
        else:
            # near s = 1 the Hurwitz terms cancel to O(1) from O(1/|s-1|); near s = 0 mpmath's
            # Hurwitz reflection loses about log10(1/|s|) digits
            extra = 0
            for c in (1, 0):
                if s != c and abs(s - c) < 1:
                    extra = max(extra, int(-mpmath.log10(abs(s - c))) + 2)
            Z = lambda j: _hurwitz_sum(s, d, j, extra)
        lq = mpmath.log(q)
        # d^m/ds^m of q^{-s} Z(s) by Leibniz
        acc = mpmath.fsum(mpmath.binomial(derivative, j) * (-lq) ** (derivative - j) * Z(j)
                          for j in range(derivative + 1))
        return q ** (-s) * acc


def _hurwitz_sum(s, d, j, extra):
    q = d.modulus
    with mpmath.extradps(extra):
        return +mpmath.fsum(d.values[a % q] * mpmath.zeta(s, mpmath.mpf(a) / q, j) for a in range(1, q + 1))


def dirichlet_series(s, d: LFunctionDescriptor, ctx: PrecisionContext, max_terms: int = 10**6):
    """Truncated sum a_k k^{-s}, stopping once coeff_bound k^{-Re s} < 10^(-digits-5)."""
    with ctx.work():
        s = mpmath.mpmathify(s)
        sigma = mpmath.re(s)
        if sigma <= 1:
            raise TruncationError("the Dirichlet series needs Re s > 1")
        eps = mpmath.mpf(10) ** (-ctx.digits - 5)
        # first k with bound * k^-sigma < eps
        kmax = int(mpmath.ceil((d.coeff_bound / eps) ** (1 / sigma)))
        if kmax > max_terms:
            raise TruncationError(f"{kmax} terms needed at Re s = {mpmath.nstr(sigma, 5)}")
        return mpmath.fsum(d.coefficient(k) * mpmath.power(k, -s) for k in range(1, kmax + 1))


def completed_L(s, d: LFunctionDescriptor, ctx: PrecisionContext):
    """Lambda(s), evaluated directly at s (no reflection)."""
    with ctx.work():
        s = mpmath.mpmathify(s)
        g = mpmath.mpf(d.N) ** (s / 2)
        for m in d.mu:
            g *= gamma_R(s + m)
        for e in d.eta:
            g *= gamma_C(s + e)
        return g * dirichlet_L(s, d, ctx)


def F_L(z, d: LFunctionDescriptor, ctx: PrecisionContext):
    """F(z) = Lambda(1/2 + z)."""
    with ctx.work():
        return completed_L(mpmath.mpf(1) / 2 + mpmath.mpmathify(z), d, ctx)


def symmetry_residual(s, d: LFunctionDescriptor, ctx: PrecisionContext):
    """|Lambda(s) - Lambda(1 - s)| / |Lambda(s)|."""
    with ctx.work():
        a = completed_L(s, d, ctx)
        b = completed_L(1 - mpmath.mpmathify(s), d, ctx)
        return abs(a - b) / abs(a)


def _log_F(z, d, ctx):
    """log F(z) as a sum of per-factor logs: continuous for Re z > 0 where L != 0 nearby."""
    s = mpmath.mpf(1) / 2 + mpmath.mpmathify(z)
    v = s / 2 * mpmath.log(d.N)
    for m in d.mu:
        t = s + m
        v += -t / 2 * mpmath.log(mpmath.pi) + mpmath.loggamma(t / 2)
    for e in d.eta:
        t = s + e
        v += mpmath.log(2) - t * mpmath.log(2 * mpmath.pi) + mpmath.loggamma(t)
    return v + mpmath.log(dirichlet_L(s, d, ctx))


def log_F_real_derivs(x, d: LFunctionDescriptor, ctx: PrecisionContext):
    """(log F, (log F)', (log F)'') at real x > 1/2."""
    with ctx.work():
        x = mpmath.mpf(x)
        s = mpmath.mpf(1) / 2 + x
        d1 = mpmath.log(d.N) / 2
        d2 = mpmath.mpf(0)
        for m in d.mu:
            t = (s + m) / 2
            d1 += -mpmath.log(mpmath.pi) / 2 + mpmath.psi(0, t) / 2
            d2 += mpmath.psi(1, t) / 4
        for e in d.eta:
            t = s + e
            d1 += -mpmath.log(2 * mpmath.pi) + mpmath.psi(0, t)
            d2 += mpmath.psi(1, t)
        L0 = dirichlet_L(s, d, ctx)
        L1 = dirichlet_L(s, d, ctx, 1)
        L2 = dirichlet_L(s, d, ctx, 2)
        d1 += L1 / L0
        d2 += L2 / L0 - (L1 / L0) ** 2
        return mpmath.re(_log_F(x, d, ctx)), d1, d2


@dataclass(frozen=True)
class LScalingSolution:
    n: int
    lam: mpmath.mpf
    residual_exact: mpmath.mpf
    residual_asymp: mpmath.mpf
    seed: mpmath.mpf
    phi2_at_1: mpmath.mpf
    descriptor: LFunctionDescriptor
    ctx: PrecisionContext

    def to_dict(self) -> dict:
        c = self.ctx
        return {
            "n": self.n, "lambda": ap_str(self.lam, c), "seed": ap_str(self.seed, c),
            "residual_exact": mpmath.nstr(self.residual_exact, 12),
            "residual_asymp": ap_str(self.residual_asymp, c), "phi2_at_1": ap_str(self.phi2_at_1, c),
            "descriptor": json.loads(self.descriptor.to_json()), "digits": c.digits,
        }


def lambda_seed_L(n: int, d: LFunctionDescriptor, ctx: PrecisionContext):
    """(4n/(J+2K)) / W((2n/(pi (J+2K))) (N/4^K)^{1/(J+2K)})."""
    with ctx.work():
        m = d.J + 2 * d.K
        arg = 2 * mpmath.mpf(n) / (mpmath.pi * m) * (mpmath.mpf(d.N) / 4**d.K) ** (mpmath.mpf(1) / m)
        return 4 * mpmath.mpf(n) / m / lambert_w0(arg, ctx)


def asymptotic_residual_L(n: int, lam, d: LFunctionDescriptor):
    """2 + (lam/n) [log(2^K/sqrt N) - (J/2 + K) log(lam/(2 pi))]; O(1/n) at lambda(n)."""
    bracket = d.K * mpmath.log(2) - mpmath.log(d.N) / 2 - (mpmath.mpf(d.J) / 2 + d.K) * mpmath.log(lam / (2 * mpmath.pi))
    return 2 + lam / n * bracket


def lambda_of_n_L(n: int, d: LFunctionDescriptor, ctx: PrecisionContext) -> LScalingSolution:
    """Root lambda > 1/2 of 2 - (lambda/n) d/dlambda log F(lambda), Newton from the seed."""
    n = int(n)
    if n < 8:
        raise BracketError(f"n={n} is below the supported range n >= 8")
    wctx = PrecisionContext(ctx.digits, ctx.guard_digits + 5)
    with wctx.work():
        def g(lam):
            _, d1, d2 = log_F_real_derivs(lam, d, wctx)
            return 2 - lam * d1 / n, -(d1 + lam * d2) / n

        seed = lambda_seed_L(n, d, wctx)
        lo, hi = max(mpmath.mpf(1), seed / 2), seed * 2
        if not (g(lo)[0] > 0 > g(hi)[0]):
            raise BracketError(f"scaling equation has no sign change in [{mpmath.nstr(lo, 6)}, {mpmath.nstr(hi, 6)}]")
        lam = seed
        tol = mpmath.mpf(10) ** (-wctx.dps + 5)
        for _ in range(200):
            val, der = g(lam)
            if val > 0:
                lo = lam
            else:
                hi = lam
            new = lam - val / der
            if not (lo < new < hi):
                new = (lo + hi) / 2
            if abs(new - lam) <= tol * lam:
                lam = new
                break
            lam = new
        else:
            raise BracketError(f"Newton iteration for lambda(n) stalled at n={n}")
        res = g(lam)[0]
        phi2 = -2 - lam**2 / n * log_F_real_derivs(lam, d, wctx)[2]
        lres = asymptotic_residual_L(n, lam, d)
    with ctx.work():
        return LScalingSolution(n=n, lam=+lam, residual_exact=+res, residual_asymp=+lres, seed=+seed,
                                phi2_at_1=+phi2, descriptor=d, ctx=ctx)


# -- Taylor data and the representation ---------------------------------------------


def _circle_coeffs(d, degree, R, nodes, dps):
    """a_k R^k for k <= degree from an upper-half-circle trapezoid sum (F real on the real axis)."""
    with mpmath.workdps(dps):
        R = mpmath.mpf(R)
        vals = []
        for j in range(nodes // 2 + 1):
            vals.append(F_L(R * mpmath.expjpi(2 * mpmath.mpf(j) / nodes), d, PrecisionContext(dps, 0)))
        full = vals + [mpmath.conj(vals[nodes - j]) for j in range(nodes // 2 + 1, nodes)]
        roots = [mpmath.expjpi(-2 * mpmath.mpf(j) / nodes) for j in range(nodes)]
        out = []
        for k in range(degree + 1):
            acc = mpmath.fsum(full[j] * roots[(j * k) % nodes] for j in range(nodes))
            out.append(mpmath.re(acc) / nodes)
        return out


def _node_count(d, degree, r, log_target, ctx):
    """Nodes N >= 4(degree+1) with the aliased term a_N r^N below exp(log_target).

    Cauchy: |a_N| r^N <= F(rho) (r/rho)^N for any rho > r; the best of a few
    rho is used.
    """
    need = None
    for m in (2, 4, 8, 16):
        rho = r * m
        k = (log_F_real_derivs(rho, d, ctx)[0] - log_target) / mpmath.log(m)
        need = k if need is None else min(need, k)
    return max(4 * (degree + 1), 2 * int(mpmath.ceil(need / 2)))


def taylor_coeffs_L(d: LFunctionDescriptor, degree: int, ctx: PrecisionContext, ratio=mpmath.mpf("1.25")):
    """Taylor coefficients a_0..a_degree of F (all of them, odd ones included).

    The radius is the saddle radius R (R (log F)'(R) = degree). Two radii
    must agree to 10^(-digits + guard) relative to the coefficient or to
    its noise floor.
    """
    if d.has_pole:
        raise DomainError("descriptors with a pole at s = 1 have no entire F; Taylor data is not defined")
    with ctx.work():
        lo, hi = mpmath.mpf(1), mpmath.mpf(2)
        while hi * log_F_real_derivs(hi, d, ctx)[1] < degree:
            lo, hi = hi, hi * 2
        for _ in range(60):
            mid = (lo + hi) / 2
            if mid * log_F_real_derivs(mid, d, ctx)[1] < degree:
                lo = mid
            else:
                hi = mid
        R = (lo + hi) / 2
        logF0 = mpmath.log(abs(F_L(0, d, ctx)))
        results = []
        for r in (R, R * ratio):
            logFR = log_F_real_derivs(r, d, ctx)[0]
            loss = int(max(0, (logFR - logF0) / mpmath.log(10))) + 1
            dps = ctx.dps + loss + 10
            nodes = _node_count(d, degree, r, logF0 - dps * mpmath.log(10), ctx)
            scaled = _circle_coeffs(d, degree, r, nodes, dps)
            with mpmath.workdps(dps):
                floor = mpmath.exp(logFR) * mpmath.mpf(10) ** (-dps + 5)
                results.append(([c / r**k for k, c in enumerate(scaled)], [floor / r**k for k in range(degree + 1)]))
        (a1, f1), (a2, f2) = results
        tol = mpmath.mpf(10) ** (-ctx.digits + ctx.guard_digits)
        coeffs = []
        for k in range(degree + 1):
            if abs(a1[k] - a2[k]) > tol * abs(a2[k]) + f1[k] + f2[k]:
                raise ConsistencyError(f"coefficient {k} disagrees between radii")
            # below the noise floor the value is zero to working precision
            coeffs.append(a2[k] if abs(a2[k]) > 10 * max(f1[k], f2[k]) else mpmath.mpf(0))
        return coeffs, R


@dataclass
class TaylorRepL:
    z: mpmath.mpc
    n: int
    lam: mpmath.mpf
    taylor: mpmath.mpc
    model: mpmath.mpc
    form: str
    meta: dict = field(default_factory=dict)

    @property
    def relative_error(self):
        return abs(self.taylor - self.model) / abs(self.model)

    def to_dict(self, ctx) -> dict:
        return {
            "z_re": ap_str(mpmath.re(self.z), ctx), "z_im": ap_str(mpmath.im(self.z), ctx),
            "n": self.n, "lambda": ap_str(self.lam, ctx), "form": self.form,
            "taylor_re": ap_str(mpmath.re(self.taylor), ctx), "taylor_im": ap_str(mpmath.im(self.taylor), ctx),
            "model_re": ap_str(mpmath.re(self.model), ctx), "model_im": ap_str(mpmath.im(self.model), ctx),
            "relative_error": mpmath.nstr(self.relative_error, 10),
        }


def _phi_L(z, sol: LScalingSolution):
    """phi(z) = 2 log z + (log F(lambda) - log F(lambda z))/n for z in the right half plane."""
    d, ctx = sol.descriptor, sol.ctx
    return 2 * mpmath.log(z) + (_log_F(sol.lam, d, ctx) - _log_F(sol.lam * z, d, ctx)) / sol.n


def _in_ball(z, sol, delta):
    zz = -z if mpmath.re(z) < 0 else z
    c = mpmath.sqrt(-sol.phi2_at_1 / 2)
    if abs(zz - 1) > 2 * delta / c:
        return False
    return abs(_phi_L(zz, sol)) < delta**2


def model_value(z, sol: LScalingSolution, delta=0.3, form: str | None = None):
    """Leading-order value of T_{2n-2}(F; lambda z): bulk form outside B_delta, erfc form inside.

    ``form`` forces one of "bulk" / "erfc".
    """
    d, ctx, n, lam = sol.descriptor, sol.ctx, sol.n, sol.lam
    with ctx.work():
        z = mpmath.mpmathify(z)
        Fz = F_L(lam * z, d, ctx)
        if form is None:
            form = "erfc" if _in_ball(z, sol, delta) else "bulk"
        if form == "bulk":
            if abs(z * z - 1) < mpmath.mpf("1e-3"):
                raise DomainError("the bulk form has poles at z = +-1")
            H0 = 2 / ((1 - z * z) * mpmath.sqrt(2 * mpmath.pi * abs(sol.phi2_at_1)))
            chi = 1 if abs(mpmath.re(z)) < 1 else 0
            # F(lam z) e^{n phi} = z^{2n} F(lam)
            return Fz * chi - z ** (2 * n) * F_L(lam, d, ctx) * H0 / mpmath.sqrt(n), form
        zz = -z if mpmath.re(z) < 0 else z
        if zz == 1:
            return Fz / 2, form
        c = -1j * mpmath.sqrt(-sol.phi2_at_1 / 2)
        lin = c * (zz - 1)
        w = lin * mpmath.sqrt(_phi_L(zz, sol) / lin**2)
        return Fz * mpmath.erfc(1j * mpmath.sqrt(n) * w) / 2, form


def taylor_rep_L(z, n: int, d: LFunctionDescriptor, ctx: PrecisionContext, delta=0.3,
                 coeffs=None, sol: LScalingSolution | None = None) -> TaylorRepL:
    """Direct value of T_{2n-2}(F; lambda z) next to its leading-order model."""
    if d.has_pole:
        raise DomainError("descriptors with a pole at s = 1 are not supported here")
    sol = sol or lambda_of_n_L(n, d, ctx)
    if coeffs is None:
        coeffs, _ = taylor_coeffs_L(d, 2 * n - 2, ctx)
    with ctx.work():
        z = mpmath.mpmathify(z)
        t = mpmath.polyval(list(reversed(coeffs[: 2 * n - 1])), sol.lam * z)
        model, form = model_value(z, sol, delta)
        return TaylorRepL(z=z, n=n, lam=sol.lam, taylor=t, model=model, form=form)
