import mpmath
import pytest

from xitaylor.phase import PhaseContext
from xitaylor.specfun import PrecisionContext
from xitaylor.xi import load_or_compute_coeffs, zeta_zero_ordinates


@pytest.fixture(autouse=True)
def _reset_mp():
    # mpmath precision is global; keep tests independent of each other
    saved = mpmath.mp.dps
    yield
    mpmath.mp.dps = saved


@pytest.fixture(scope="session")
def ctx30():
    return PrecisionContext(30)


@pytest.fixture(scope="session")
def T402():
    """Degree-402 coefficients at 300 digits (cached on disk after the first run)."""
    return load_or_compute_coeffs(402, PrecisionContext(300), workers=4)


@pytest.fixture(scope="session")
def ordinates300(T402):
    return zeta_zero_ordinates(60, T402.ctx)


@pytest.fixture(scope="session")
def ordinates30():
    return zeta_zero_ordinates(130, PrecisionContext(30))


@pytest.fixture(scope="session")
def pc102(ctx30):
    return PhaseContext.for_n(102, ctx30)


@pytest.fixture(scope="session")
def pc52(ctx30):
    return PhaseContext.for_n(52, ctx30)


@pytest.fixture(scope="session")
def zeros_cache():
    """Root sets keyed by n, shared between modules."""
    return {}


def get_zero_set(cache, n, T402, ctx):
    from xitaylor.zeros import find_all_roots

    if n not in cache:
        pc = PhaseContext.for_n(n, ctx)
        cache[n] = (pc, find_all_roots(T402.truncate(2 * n - 2), pc.scaling, ctx))
    return cache[n]
