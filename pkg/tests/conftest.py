import numpy as np
import pytest

from entropydg import EulerParams, build_reference_element


@pytest.fixture(scope="session")
def params():
    return EulerParams()


@pytest.fixture(scope="session")
def element_cache():
    cache = {}

    def get(p):
        if p not in cache:
            cache[p] = build_reference_element(p)
        return cache[p]

    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_admissible(rng, shape=(), rho_range=(0.1, 2.0), v_range=(-1.0, 1.0),
                      p_range=(0.1, 2.0), gamma=1.4):
    """Random conserved states with positive density and pressure."""
    rho = rng.uniform(*rho_range, size=shape)
    v = rng.uniform(*v_range, size=shape)
    p = rng.uniform(*p_range, size=shape)
    E = p / (gamma - 1.0) + 0.5 * rho * v * v
    return np.stack([rho, rho * v, E], axis=-1)


def projected_smooth_cells(element, n_cells, freq=2.0, lo=0.0,
                           hi=2.0 * np.pi, gamma=1.4):
    """Per-cell L2 projection of a smooth admissible field (oracle-grade).

    The projection is computed with a 10(p+1)-point Gauss rule in the
    orthonormal Legendre basis, independently of the solver's modal
    machinery. Unlike nodal interpolation (whose traces are continuous
    because the interface point is a shared node), projected cell data
    jumps at the interfaces at order dx^(p+1).
    """
    p = element.p
    dx = (hi - lo) / n_cells
    centers = lo + dx * (np.arange(n_cells) + 0.5)
    xq, wq = np.polynomial.legendre.leggauss(10 * (p + 1))
    x = centers[:, None] + 0.5 * dx * xq[None, :]
    rho = 2.0 + 0.3 * np.sin(freq * x)
    v = 0.5 + 0.2 * np.cos(freq * x)
    pr = 2.0 + 0.4 * np.sin(freq * x + 1.0)
    E = pr / (gamma - 1.0) + 0.5 * rho * v * v
    f = np.stack([rho, rho * v, E], axis=-1)
    scale = np.sqrt((2.0 * np.arange(p + 1) + 1.0) / 2.0)
    Pq = np.polynomial.legendre.legvander(xq, p) * scale
    coeffs = np.einsum("q,qm,nqc->nmc", wq, Pq, f)
    return np.einsum("km,nmc->nkc", element.vandermonde, coeffs), dx


def periodic_traces(values):
    """Full-order interface traces with periodic wrap, shape (N+1, 3)."""
    n = values.shape[0]
    um = np.empty((n + 1, 3))
    up = np.empty((n + 1, 3))
    um[1:] = values[:, -1, :]
    um[0] = values[-1, -1, :]
    up[:-1] = values[:, 0, :]
    up[-1] = values[0, 0, :]
    return um, up
