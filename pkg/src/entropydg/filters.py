"""Positive conservative filters from the intra-cell heat semigroup.

One filter is built per polynomial degree. The construction discretizes
the Neumann heat equation with mollifier conductivity on the reference
element,

    du/dt = -M^{-1} Q u,   Q_kl = int phi_k'(x) alpha(x) phi_l'(x) dx,

and takes the solution operator C(t) = exp(-t M^{-1} Q). C(t) always
has unit row sums and preserves the quadrature mean; for t >= t* it is
also entrywise non-negative, hence a positive conservative filter that
dissipates every convex entropy. The generator G = (C(t*) - Id)/t*
supplies the correction direction used by the rate limiter.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import BracketFailureError

__all__ = ["FilterOperator", "mollifier_alpha", "assemble_Q",
           "heat_semigroup", "find_positive_time", "build_generator",
           "filter_to_json"]

_NEG_TOL = -1e-13


def mollifier_alpha(x):
    """Standard mollifier bump: exp(1 - 1/(1-x^2)) inside |x| < 1, else 0.

    Smooth with all derivatives vanishing at the cell ends, which makes
    the heat flux conservative on the closed element.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
    return out if out.ndim else float(out)


def _basis_derivatives_at(element, x):
    """phi_k'(x) for all Lagrange basis functions, shape (len(x), p+1)."""
    from .element import _legendre_deriv_all  # shared Legendre recurrences
    scale = np.sqrt((2.0 * np.arange(element.p + 1) + 1.0) / 2.0)
    dP = _legendre_deriv_all(np.asarray(x, dtype=float), element.p) * scale
    return dP @ element.inv_vandermonde


def assemble_Q(element, n_quad=None):
    """Stiffness-like Gramian of the conductivity form, int phi_k' alpha phi_l'.

    alpha is not polynomial, so the integral is approximated by a
    4(p+1)-point Gauss rule; the constant-kernel identity Q @ 1 = 0 is
    then restored exactly by symmetric double-centering (a perturbation
    at quadrature-error level).
    """
    if n_quad is None:
        n_quad = 4 * (element.p + 1)
    xq, wq = np.polynomial.legendre.leggauss(n_quad)
    dphi = _basis_derivatives_at(element, xq)
    Q = dphi.T @ (dphi * (wq * mollifier_alpha(xq))[:, None])
    Q = 0.5 * (Q + Q.T)
    n = element.p + 1
    P = np.eye(n) - np.full((n, n), 1.0 / n)
    Q = P @ Q @ P
    return 0.5 * (Q + Q.T)


def _eigensystem(element, Q):
    """M-orthonormal eigensystem of the pencil Q psi = lam M psi.

    Returns ascending eigenvalues with lam[0] forced to 0 and the first
    eigenvector forced to the constant, so the conservation identities
    of the semigroup hold to round-off by construction.
    """
    lam, psi = eigh(Q, np.diag(element.weights))
    lam = np.clip(lam, 0.0, None)
    lam[0] = 0.0
    psi[:, 0] = 1.0 / np.sqrt(element.weights.sum())
    psi_t_m = psi.T * element.weights
    return lam, psi, psi_t_m


def heat_semigroup(element, Q, t):
    """Solution operator C(t) = exp(-t M^{-1} Q) of the filtered heat flow."""
    if t < 0.0:
        raise ValueError(f"semigroup time must be non-negative, got {t}")
    lam, psi, psi_t_m = _eigensystem(element, Q)
    return (psi * np.exp(-t * lam)) @ psi_t_m


def find_positive_time(element, Q, neg_tol=_NEG_TOL):
    """Smallest t with C(t) entrywise >= neg_tol, by bisection.

    The bracket is [0, 64/lam_2]; at its upper end every non-constant
    mode has decayed by e^{-64} and the rows approach the weight vector,
    so a bracket failure indicates an assembly bug. Also reports whether
    C(t*/2) still has a negative entry (a diagnostic only; positivity is
    not provably monotone in t).
    """
    lam, psi, psi_t_m = _eigensystem(element, Q)

    def min_entry(t):
        return float(((psi * np.exp(-t * lam)) @ psi_t_m).min())

    lam2 = lam[1]
    hi = 64.0 / lam2
    if min_entry(hi) < neg_tol:
        raise BracketFailureError(
            f"no positivity time in [0, {hi:.3e}] for p={element.p}")
    lo = 0.0
    tol = 1e-6 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if min_entry(mid) >= neg_tol:
            hi = mid
        else:
            lo = mid
    t_star = hi
    half_negative = min_entry(0.5 * t_star) < neg_tol
    return t_star, half_negative


@dataclass(frozen=True)
class FilterOperator:
    """Generator G, filter Upsilon = Id + t* G and their certificates.

    ``eigenvalues`` are those of -M^{-1} Q (the first is zero, the rest
    negative); ``spectral_radius`` is the 2-norm of G, logged so runs
    can audit the time-step limit of the pure filter flow.
    """

    p: int
    generator: np.ndarray
    upsilon: np.ndarray
    t_star: float
    eigenvalues: np.ndarray
    spectral_radius: float
    half_time_negative: bool


def build_generator(element):
    """Build the per-degree filter operator G = (C(t*) - Id)/t*.

    G is assembled in the eigenbasis (g(lam) = expm1(-t* lam)/t*), which
    keeps the kernel identities G @ 1 = 0 and w^T G = 0 exact without
    dividing round-off by a possibly tiny t*. Negative off-diagonal dust
    (bounded by the bisection tolerance) is moved onto the diagonal, so
    G is a positive conservative generator entry by entry.
    """
    Q = assemble_Q(element)
    lam, psi, psi_t_m = _eigensystem(element, Q)
    t_star, half_negative = find_positive_time(element, Q)
    gvals = np.expm1(-t_star * lam) / t_star
    gvals[0] = 0.0
    G = (psi * gvals) @ psi_t_m
    # clip negative off-diagonal dust into the diagonal: row sums exact
    off_neg = np.minimum(G, 0.0)
    np.fill_diagonal(off_neg, 0.0)
    G = G - off_neg
    G[np.diag_indices_from(G)] += off_neg.sum(axis=1)
    upsilon = np.eye(element.p + 1) + t_star * G
    np.clip(upsilon, 0.0, None, out=upsilon)
    return FilterOperator(p=element.p, generator=G, upsilon=upsilon,
                          t_star=t_star, eigenvalues=-lam,
                          spectral_radius=float(np.linalg.norm(G, 2)),
                          half_time_negative=half_negative)


def filter_to_json(filt, path):
    """Dump the filter operator for offline inspection."""
    payload = {
        "p": filt.p,
        "t_star": filt.t_star,
        "eigenvalues": filt.eigenvalues.tolist(),
        "spectral_radius": filt.spectral_radius,
        "half_time_negative": bool(filt.half_time_negative),
        "generator": filt.generator.tolist(),
        "upsilon": filt.upsilon.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
