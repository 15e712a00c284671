import numpy as np
import pytest
import scipy.linalg as sla

from tpcmg import BandedCorrection, ToeplitzSpec, TpcOperator


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def dense_toeplitz(spec):
    """Independent dense form of a ToeplitzSpec via scipy.linalg.toeplitz."""
    full = spec.coeffs
    m = spec.m
    col = full[m - 1::-1]    # t_0, t_{-1}, ...
    row = full[m - 1:]       # t_0, t_1, ...
    return sla.toeplitz(col, row)


def random_tpc(rng, m, symmetric=False, banded_bw=None):
    """Random TpcOperator, optionally symmetric or with a banded part."""
    def spec(sym):
        c = rng.standard_normal(2 * m - 1)
        if sym:
            c = 0.5 * (c + c[::-1])
        return ToeplitzSpec(m, c, symmetric=sym)

    if symmetric:
        A = spec(True)
        Dbar = spec(True)
        Bbar = spec(False)
        Cbar = Bbar.transpose()
        p = rng.standard_normal(m)
        q = p.copy()
        xi = rng.standard_normal(m)
        zeta = xi.copy()
    else:
        A, Bbar, Cbar, Dbar = spec(False), spec(False), spec(False), spec(False)
        p, q, xi, zeta = (rng.standard_normal(m) for _ in range(4))
    o = float(rng.standard_normal())
    banded = None
    if banded_bw is not None:
        n = 2 * m + 1
        bands = {}
        for l in range(-banded_bw, banded_bw + 1):
            if symmetric and l < 0:
                continue
            bands[l] = rng.standard_normal(n - abs(l))
        if symmetric:
            for l in list(bands):
                if l > 0:
                    bands[-l] = bands[l].copy()
        banded = BandedCorrection(n, bands)
    return TpcOperator(A, Bbar, Cbar, Dbar, p, q, xi, zeta, o,
                       banded=banded, symmetric=symmetric)
