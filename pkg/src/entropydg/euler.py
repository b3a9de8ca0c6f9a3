"""Pointwise algebra for the 1D compressible Euler equations.

All functions are vectorized over leading axes; the trailing axis holds
the conserved triple (rho, rho*v, E). The entropy pair is the physical
one, U = -rho*S with S = ln(p rho^-gamma), F = -rho*v*S.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleStateError

__all__ = ["EulerParams", "pressure", "velocity", "sound_speed", "flux",
           "entropy_pair", "entropy_variables", "wave_speed_bounds",
           "max_signal_speed", "check_admissible", "primitive_to_conserved"]


@dataclass(frozen=True)
class EulerParams:
    """Ideal-gas parameters; gamma defaults to 1.4 for all test problems."""

    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")


def _locate(mask):
    """Index of the first True entry, as a tuple, for error reporting."""
    idx = np.argwhere(mask)
    return tuple(int(i) for i in idx[0]) if idx.size else None


def check_admissible(u, params, where="", p=None):
    """Raise InadmissibleStateError unless rho > 0 and pressure > 0 everywhere."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    if not np.all(np.isfinite(u)):
        loc = _locate(~np.isfinite(u).all(axis=-1))
        raise InadmissibleStateError(
            f"non-finite state{' in ' + where if where else ''} at {loc}",
            cell=loc[0] if loc else None,
            node=loc[1] if loc and len(loc) > 1 else None)
    if np.any(rho <= 0.0):
        loc = _locate(rho <= 0.0)
        raise InadmissibleStateError(
            f"non-positive density{' in ' + where if where else ''} at {loc}",
            cell=loc[0] if loc else None,
            node=loc[1] if loc and len(loc) > 1 else None)
    if p is None:
        p = (params.gamma - 1.0) * (u[..., 2] - 0.5 * u[..., 1] ** 2 / rho)
    if np.any(p <= 0.0):
        loc = _locate(p <= 0.0)
        raise InadmissibleStateError(
            f"non-positive pressure{' in ' + where if where else ''} at {loc}",
            cell=loc[0] if loc else None,
            node=loc[1] if loc and len(loc) > 1 else None)


def pressure(u, params, validate=True):
    """p = (gamma - 1)(E - rho v^2 / 2); positive iff the state is admissible."""
    u = np.asarray(u, dtype=float)
    if validate:
        check_admissible(u, params)
    return (params.gamma - 1.0) * (u[..., 2] - 0.5 * u[..., 1] ** 2 / u[..., 0])


def velocity(u):
    u = np.asarray(u, dtype=float)
    return u[..., 1] / u[..., 0]


def sound_speed(u, params, validate=True, p=None):
    if p is None:
        p = pressure(u, params, validate=validate)
    return np.sqrt(params.gamma * p / np.asarray(u, dtype=float)[..., 0])


def flux(u, params, validate=True, p=None):
    """Physical flux f(u) = (rho v, rho v^2 + p, v (E + p))."""
    u = np.asarray(u, dtype=float)
    if p is None:
        p = pressure(u, params, validate=validate)
    v = u[..., 1] / u[..., 0]
    out = np.empty_like(u)
    out[..., 0] = u[..., 1]
    out[..., 1] = u[..., 1] * v + p
    out[..., 2] = v * (u[..., 2] + p)
    return out


def entropy_pair(u, params, validate=True, p=None):
    """Physical entropy and entropy flux, (U, F) = (-rho S, -rho v S)."""
    u = np.asarray(u, dtype=float)
    if p is None:
        p = pressure(u, params, validate=validate)
    rho = u[..., 0]
    S = np.log(p) - params.gamma * np.log(rho)
    return -rho * S, -u[..., 1] * S


def entropy_variables(u, params, validate=True, p=None):
    """Gradient of U = -rho ln(p rho^-gamma) with respect to (rho, rho v, E)."""
    u = np.asarray(u, dtype=float)
    if p is None:
        p = pressure(u, params, validate=validate)
    rho = u[..., 0]
    v = u[..., 1] / rho
    S = np.log(p) - params.gamma * np.log(rho)
    gm1 = params.gamma - 1.0
    w = np.empty_like(u)
    w[..., 0] = params.gamma - S - 0.5 * gm1 * rho * v * v / p
    w[..., 1] = gm1 * u[..., 1] / p
    w[..., 2] = -gm1 * rho / p
    return w


def max_signal_speed(u, params, validate=True, p=None):
    """|v| + c, the local Lax-Friedrichs dissipation speed."""
    return np.abs(velocity(u)) + sound_speed(u, params, validate=validate, p=p)


def wave_speed_bounds(u_l, u_r, params, validate=True, p_l=None, p_r=None):
    """Davis signal-speed estimates (a_l, a_r) enclosing the Riemann fan.

    a_l = min(v - c) and a_r = max(v + c) over the two states, so
    a_l < a_r always holds for admissible inputs.
    """
    c_l = sound_speed(u_l, params, validate=validate, p=p_l)
    c_r = sound_speed(u_r, params, validate=validate, p=p_r)
    v_l = velocity(u_l)
    v_r = velocity(u_r)
    a_l = np.minimum(v_l - c_l, v_r - c_r)
    a_r = np.maximum(v_l + c_l, v_r + c_r)
    return a_l, a_r


def primitive_to_conserved(rho, v, p, params):
    """Stack (rho, v, p) fields into conserved variables along a new last axis."""
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    E = p / (params.gamma - 1.0) + 0.5 * rho * v * v
    return np.stack([rho, rho * v, E], axis=-1)
