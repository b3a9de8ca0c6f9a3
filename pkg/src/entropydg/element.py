"""Single-cell polynomial infrastructure on the reference interval [-1, 1].

Collocation uses Legendre-Gauss-Lobatto nodes with the lumped (diagonal)
mass matrix, so the quadrature weights are positive by construction and
boundary traces are plain node extractions.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ReferenceElement", "build_reference_element", "modal_truncate",
           "truncation_matrix", "evaluation_matrix"]

_NODE_TOL = 1e-14
_RESIDUAL_TOL = 1e-13


def _legendre_all(x, p):
    """Values of P_0..P_p at the points x, shape (len(x), p+1)."""
    x = np.asarray(x, dtype=float)
    vals = np.zeros(x.shape + (p + 1,))
    vals[..., 0] = 1.0
    if p >= 1:
        vals[..., 1] = x
    for n in range(1, p):
        vals[..., n + 1] = ((2 * n + 1) * x * vals[..., n] - n * vals[..., n - 1]) / (n + 1)
    return vals


def _legendre_deriv_all(x, p):
    """Values of P_0'..P_p' at the points x, shape (len(x), p+1).

    Uses (1-x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x)) away from the
    endpoints and the closed form P_n'(+-1) = (+-1)^{n-1} n(n+1)/2 there.
    """
    x = np.asarray(x, dtype=float)
    P = _legendre_all(x, p)
    dP = np.zeros_like(P)
    interior = np.abs(x) < 1.0 - 1e-12
    xi = x[interior]
    for n in range(1, p + 1):
        dP[interior, n] = n * (P[interior, n - 1] - xi * P[interior, n]) / (1.0 - xi * xi)
    edge = ~interior
    if np.any(edge):
        s = np.sign(x[edge])
        for n in range(1, p + 1):
            dP[edge, n] = s ** (n - 1) * n * (n + 1) / 2.0
    return dP


def _lobatto_nodes_weights(p):
    """LGL nodes (ascending) and weights for degree p (p+1 points)."""
    n = p + 1
    if p == 1:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    # interior nodes are the roots of P_p'; Newton from Chebyshev guesses
    k = np.arange(1, p)
    x = -np.cos(np.pi * k / p)
    for _ in range(100):
        P = _legendre_all(x, p)
        dP = p * (P[:, p - 1] - x * P[:, p]) / (1.0 - x * x)
        d2P = (2.0 * x * dP - p * (p + 1) * P[:, p]) / (1.0 - x * x)
        dx = dP / d2P
        x = x - dx
        if np.max(np.abs(dx)) < _NODE_TOL:
            break
    P = _legendre_all(x, p)
    residual = p * (P[:, p - 1] - x * P[:, p]) / (1.0 - x * x)
    if np.max(np.abs(residual)) >= _RESIDUAL_TOL:
        raise RuntimeError(
            f"LGL node solve for p={p} stalled at residual {np.max(np.abs(residual)):.3e}")
    nodes = np.concatenate(([-1.0], np.sort(x), [1.0]))
    Pn = _legendre_all(nodes, p)[:, p]
    weights = 2.0 / (p * n * Pn * Pn)
    return nodes, weights


@dataclass(frozen=True)
class ReferenceElement:
    """Nodes, quadrature and Gramian matrices for one polynomial degree.

    ``vandermonde`` holds nodal values of the orthonormal Legendre basis,
    so ``inv_vandermonde @ u`` are the Legendre coefficients of the nodal
    polynomial u.
    """

    p: int
    nodes: np.ndarray
    weights: np.ndarray
    mass: np.ndarray
    stiffness: np.ndarray
    diff: np.ndarray
    vandermonde: np.ndarray
    inv_vandermonde: np.ndarray = field(repr=False, default=None)

    @property
    def n_nodes(self):
        return self.p + 1


def build_reference_element(p):
    """Build the degree-p LGL collocation element.

    The quadrature is exact up to degree 2p-1, the mass matrix is the
    lumped diag(weights), and diff differentiates degree <= p polynomials
    exactly at the nodes.
    """
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ValueError(f"polynomial degree must be an integer >= 1, got {p!r}")
    p = int(p)
    nodes, weights = _lobatto_nodes_weights(p)
    scale = np.sqrt((2.0 * np.arange(p + 1) + 1.0) / 2.0)
    V = _legendre_all(nodes, p) * scale
    dV = _legendre_deriv_all(nodes, p) * scale
    Vinv = np.linalg.inv(V)
    D = dV @ Vinv
    M = np.diag(weights)
    S = D.T * weights  # S[k, l] = w_l D[l, k] = <phi_k', phi_l>
    return ReferenceElement(p=p, nodes=nodes, weights=weights, mass=M,
                            stiffness=S, diff=D, vandermonde=V,
                            inv_vandermonde=Vinv)


def evaluation_matrix(element, xi):
    """Matrix mapping nodal values to point values at reference points xi."""
    xi = np.asarray(xi, dtype=float)
    scale = np.sqrt((2.0 * np.arange(element.p + 1) + 1.0) / 2.0)
    P = _legendre_all(xi, element.p) * scale
    return P @ element.inv_vandermonde


def truncation_matrix(element, target_degree):
    """Nodal matrix of the L2 projection onto polynomials of degree <= target."""
    if not 0 <= target_degree <= element.p:
        raise ValueError(
            f"target degree {target_degree} outside [0, {element.p}]")
    keep = np.zeros(element.p + 1)
    keep[:target_degree + 1] = 1.0
    return (element.vandermonde * keep) @ element.inv_vandermonde


def modal_truncate(element, nodal, target_degree):
    """Project the nodal polynomial onto degree <= target_degree.

    Drops the trailing Legendre coefficients; the projection is orthogonal
    with respect to the exact L2 inner product and idempotent.
    """
    nodal = np.asarray(nodal, dtype=float)
    coeffs = element.inv_vandermonde @ nodal
    if not 0 <= target_degree <= element.p:
        raise ValueError(
            f"target degree {target_degree} outside [0, {element.p}]")
    coeffs[target_degree + 1:] = 0.0
    return element.vandermonde @ coeffs
