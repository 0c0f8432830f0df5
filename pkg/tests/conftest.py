import numpy as np
import pytest
from scipy.optimize import linprog

from jensen_duality.duality import build_grid, stencil_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def highs_qn(n, f, cone, R=1.0):
    """Reference q_n from HiGHS on the plain formulation ``v <= x``, ``S v >= 0`` (or ``= 0``)."""
    g = build_grid(R, n)
    with np.errstate(divide="ignore"):
        x = g.sample(f)
    S = stencil_matrix(g).toarray()
    c = np.zeros(g.size)
    c[g.origin] = -1.0
    zero = np.zeros(S.shape[0])
    kw = dict(A_ub=-S, b_ub=zero) if cone == "subharmonic" else dict(A_eq=S, b_eq=zero)
    res = linprog(c, bounds=[(None, xi) for xi in x], method="highs", **kw)
    assert res.status == 0
    return -res.fun
