"""Uncorrected nodal DG right-hand side on a uniform 1D mesh.

The collocation form is used: per cell T,

    M (dx/2) du/dt = S f(u) - (boundary flux terms),

with M = diag(w), S = D^T diag(w), local Lax-Friedrichs interface
fluxes, and ghost states by boundary mode (periodic wrap or transmissive
copy of the boundary trace).
"""

from dataclasses import dataclass, field

import numpy as np

from . import euler

__all__ = ["Mesh1D", "ConservedState", "RhsBundle", "llf_flux",
           "numerical_entropy_flux", "interface_traces", "semidiscrete_rhs",
           "discrete_total_entropy", "conserved_totals"]


@dataclass(frozen=True)
class Mesh1D:
    """Uniform subdivision of [x_left, x_right] into n_cells cells."""

    n_cells: int
    x_left: float
    x_right: float
    boundary: str = "transmissive"  # or "periodic"

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError(f"need at least 2 cells, got {self.n_cells}")
        if not self.x_right > self.x_left:
            raise ValueError("empty domain")
        if self.boundary not in ("periodic", "transmissive"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")

    @property
    def dx(self):
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def periodic(self):
        return self.boundary == "periodic"

    def node_coords(self, element):
        """Physical node positions, shape (n_cells, p+1)."""
        centers = self.x_left + self.dx * (np.arange(self.n_cells) + 0.5)
        return centers[:, None] + 0.5 * self.dx * element.nodes[None, :]


@dataclass
class ConservedState:
    """Nodal conserved values over the whole mesh at one time."""

    mesh: Mesh1D
    values: np.ndarray  # (n_cells, p+1, 3)
    t: float = 0.0


@dataclass
class RhsBundle:
    """Time derivative plus the interface fluxes that produced it.

    Interface i sits between cell i-1 and cell i (i = 0..N); interior
    fluxes are shared identically by both adjacent cells. The nodal and
    trace pressures are kept for reuse by the rate limiter.
    """

    dudt: np.ndarray            # (n_cells, p+1, 3)
    iface_flux: np.ndarray      # (n_cells+1, 3)
    iface_entropy_flux: np.ndarray  # (n_cells+1,)
    traces_minus: np.ndarray = field(default=None, repr=False)
    traces_plus: np.ndarray = field(default=None, repr=False)
    nodal_pressure: np.ndarray = field(default=None, repr=False)
    trace_pressure_minus: np.ndarray = field(default=None, repr=False)
    trace_pressure_plus: np.ndarray = field(default=None, repr=False)


def llf_flux(u_l, u_r, params, validate=True):
    """Local Lax-Friedrichs flux with per-interface speed max(|v|+c)."""
    u_l = np.asarray(u_l, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    c_max = np.maximum(euler.max_signal_speed(u_l, params, validate=validate),
                       euler.max_signal_speed(u_r, params, validate=validate))
    f_l = euler.flux(u_l, params, validate=False)
    f_r = euler.flux(u_r, params, validate=False)
    return 0.5 * (f_l + f_r) - 0.5 * np.asarray(c_max)[..., None] * (u_r - u_l)


def numerical_entropy_flux(u_l, u_r, params, validate=True):
    """Entropy flux paired with llf_flux; same c_max, U-jump dissipation."""
    c_max = np.maximum(euler.max_signal_speed(u_l, params, validate=validate),
                       euler.max_signal_speed(u_r, params, validate=validate))
    U_l, F_l = euler.entropy_pair(u_l, params, validate=False)
    U_r, F_r = euler.entropy_pair(u_r, params, validate=False)
    return 0.5 * (F_l + F_r) - 0.5 * c_max * (U_r - U_l)


def interface_traces(values, mesh, weights=None):
    """Left/right trace states at all N+1 interfaces, ghosts per boundary mode.

    Transmissive ghosts copy the quadrature mean of the boundary cell
    when ``weights`` is supplied, else its boundary-node value. The mean
    ghost matters at high degree: a trace-copy ghost makes the boundary
    face dissipation-free, which admits a slowly growing outflow mode
    (both ghosts coincide for constant boundary cells).
    """
    n = mesh.n_cells
    shape = (n + 1,) + values.shape[2:]
    um = np.empty(shape)
    up = np.empty(shape)
    um[1:] = values[:, -1]
    up[:-1] = values[:, 0]
    if mesh.periodic:
        um[0] = values[-1, -1]
        up[-1] = values[0, 0]
    elif weights is None:
        um[0] = values[0, 0]
        up[-1] = values[-1, -1]
    else:
        um[0] = np.tensordot(weights, values[0], axes=1) / weights.sum()
        up[-1] = np.tensordot(weights, values[-1], axes=1) / weights.sum()
    return um, up


def semidiscrete_rhs(state, element, params):
    """Evaluate the uncorrected DG time derivative for the whole mesh."""
    u = state.values
    mesh = state.mesh
    w = element.weights
    p_nodal = euler.pressure(u, params, validate=False)
    euler.check_admissible(u, params, where="rhs input", p=p_nodal)
    f = euler.flux(u, params, validate=False, p=p_nodal)
    # volume term (S f)_k = sum_l w_l D[l, k] f_l
    vol = np.tensordot(f, element.diff * w[:, None], axes=([1], [0]))
    vol = vol.transpose(0, 2, 1)
    um, up = interface_traces(u, mesh, weights=w)
    pm = euler.pressure(um, params, validate=False)
    pp = euler.pressure(up, params, validate=False)
    c_max = np.maximum(euler.max_signal_speed(um, params, validate=False, p=pm),
                       euler.max_signal_speed(up, params, validate=False, p=pp))
    f_m = euler.flux(um, params, validate=False, p=pm)
    f_p = euler.flux(up, params, validate=False, p=pp)
    fstar = 0.5 * (f_m + f_p) - 0.5 * c_max[:, None] * (up - um)
    U_m, F_m = euler.entropy_pair(um, params, validate=False, p=pm)
    U_p, F_p = euler.entropy_pair(up, params, validate=False, p=pp)
    Fstar = 0.5 * (F_m + F_p) - 0.5 * c_max * (U_p - U_m)
    dudt = vol
    dudt[:, -1, :] -= fstar[1:]
    dudt[:, 0, :] += fstar[:-1]
    dudt *= (2.0 / mesh.dx) / w[None, :, None]
    return RhsBundle(dudt=dudt, iface_flux=fstar, iface_entropy_flux=Fstar,
                     traces_minus=um, traces_plus=up, nodal_pressure=p_nodal,
                     trace_pressure_minus=pm, trace_pressure_plus=pp)


def discrete_total_entropy(values, element, params, dx):
    """Quadrature total entropy, sum_T sum_k (dx/2) w_k U(u_k)."""
    U, _ = euler.entropy_pair(values, params)
    return float(0.5 * dx * np.sum(U * element.weights[None, :]))


def conserved_totals(values, element, dx):
    """Mesh integrals of the three conserved components."""
    return 0.5 * dx * np.einsum("k,nkc->c", element.weights, values)
