"""Lower bounds on the entropy dissipation rate across cell interfaces.

The bound comes from the two-speed cone estimate: with signal-speed
bounds a_l < a_r, the cone-average state

    u_lr = (a_r u_r - a_l u_l + f(u_l) - f(u_r)) / (a_r - a_l)

and Jensen's inequality give, for any exact weak solution,

    sigma >= (a_r - a_l) U(u_lr) + a_l U(u_l) - a_r U(u_r) + F(u_r) - F(u_l),

clipped at zero so equal traces and round-off never request entropy
production. The entropy-flux sign is fixed by the scalar Burgers shock
oracle (see tests): with the opposite sign the "lower bound" would sit
above the exact shock production.

For degree p > 2 the bound is additionally evaluated on the traces of
the degree-(p-1) projections of both cells and the minimum of the two
is used, which guards against unluckily smooth under-resolved data.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import euler
from .errors import DegenerateSpeedsError
from .element import truncation_matrix

__all__ = ["InterfacePrediction", "hll_intermediate", "hll_state",
           "rate_bound_core", "dissipation_rate_bound",
           "interface_prediction", "predict_interfaces"]

_TRUNCATION_MIN_DEGREE = 3  # the two-order trick is used above p = 2


@dataclass
class InterfacePrediction:
    """Entropy-rate bound at one interface and its ingredients.

    ``sigma`` is min(sigma_p, sigma_pm1) when the truncated branch ran,
    otherwise sigma_p. ``a_l``, ``a_r`` and ``u_lr`` belong to the
    full-order branch. ``truncation_fallback`` records that the
    truncated traces left the admissible set and were ignored.
    """

    sigma_p: float
    sigma_pm1: float
    sigma: float
    a_l: float
    a_r: float
    u_lr: np.ndarray
    truncation_fallback: bool = False


def hll_intermediate(u_l, u_r, f_l, f_r, a_l, a_r):
    """Cone-average state from states, flux values and speed bounds.

    Works for scalars and for arrays with the component axis last;
    raises when the speed bounds (nearly) coincide.
    """
    a_l = np.asarray(a_l, dtype=float)
    a_r = np.asarray(a_r, dtype=float)
    gap = a_r - a_l
    scale = np.maximum(np.maximum(np.abs(a_l), np.abs(a_r)), 1.0)
    if np.any(gap < 1e-14 * scale):
        raise DegenerateSpeedsError(
            f"signal-speed gap {np.min(gap):.3e} below round-off")
    u_l = np.asarray(u_l, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    if u_l.ndim > a_l.ndim:  # broadcast speeds over the component axis
        a_l = a_l[..., None]
        a_r = a_r[..., None]
        gap = gap[..., None]
    return (a_r * u_r - a_l * u_l + np.asarray(f_l) - np.asarray(f_r)) / gap


def hll_state(u_l, u_r, a_l, a_r, params):
    """Euler cone-average state for given speed bounds."""
    f_l = euler.flux(u_l, params)
    f_r = euler.flux(u_r, params)
    return hll_intermediate(u_l, u_r, f_l, f_r, a_l, a_r)


def rate_bound_core(U_l, U_r, U_lr, F_l, F_r, a_l, a_r):
    """Clipped dissipation-rate bound from entropy values at the three states."""
    sigma = (a_r - a_l) * U_lr + a_l * U_l - a_r * U_r + F_r - F_l
    return np.minimum(sigma, 0.0)


def _euler_sigma(u_l, u_r, params, widen_retries=3, p_l=None, p_r=None):
    """sigma, a_l, a_r, u_lr for admissible Euler trace pairs (vectorized).

    If the cone-average state is inadmissible the speed bounds are
    widened (the bound stays valid for any enclosing cone); this never
    triggers for Davis bounds in the test problems but keeps long runs
    from dying on a pathological pair.
    """
    u_l = np.asarray(u_l, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    if p_l is None:
        p_l = euler.pressure(u_l, params, validate=False)
    if p_r is None:
        p_r = euler.pressure(u_r, params, validate=False)
    a_l, a_r = euler.wave_speed_bounds(u_l, u_r, params, validate=False,
                                       p_l=p_l, p_r=p_r)
    f_l = euler.flux(u_l, params, validate=False, p=p_l)
    f_r = euler.flux(u_r, params, validate=False, p=p_r)
    u_lr = hll_intermediate(u_l, u_r, f_l, f_r, a_l, a_r)
    for _ in range(widen_retries):
        rho = u_lr[..., 0]
        pr = (params.gamma - 1.0) * (u_lr[..., 2] - 0.5 * u_lr[..., 1] ** 2
                                     / np.where(rho > 0, rho, 1.0))
        bad = (rho <= 0.0) | (pr <= 0.0)
        if not np.any(bad):
            break
        gap = a_r - a_l
        a_l = np.where(bad, a_l - gap, a_l)
        a_r = np.where(bad, a_r + gap, a_r)
        u_lr = np.where(np.asarray(bad)[..., None],
                        hll_intermediate(u_l, u_r, f_l, f_r, a_l, a_r), u_lr)
    U_l, F_l_e = euler.entropy_pair(u_l, params, validate=False, p=p_l)
    U_r, F_r_e = euler.entropy_pair(u_r, params, validate=False, p=p_r)
    U_lr, _ = euler.entropy_pair(u_lr, params)
    sigma = rate_bound_core(U_l, U_r, U_lr, F_l_e, F_r_e, a_l, a_r)
    # bitwise-equal traces dissipate nothing: pin the bound to exact zero
    # rather than round-off dust
    equal = np.all(u_l == u_r, axis=-1)
    sigma = np.where(equal, 0.0, sigma)
    if sigma.ndim == 0:
        sigma = float(sigma)
    return sigma, a_l, a_r, u_lr


@njit(cache=True)
def _sigma_kernel(um, up, pm, pp, gamma):
    """Batched clipped rate bound for (M, 3) trace pairs.

    Returns (sigma, bad); ``bad`` marks pairs whose cone-average state
    left the admissible set, which the caller repairs on the slow path.
    """
    m = um.shape[0]
    sigma = np.zeros(m)
    bad = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        rl, ml, el = um[i, 0], um[i, 1], um[i, 2]
        rr, mr, er = up[i, 0], up[i, 1], up[i, 2]
        if rl == rr and ml == mr and el == er:
            continue
        pl, pr = pm[i], pp[i]
        vl, vr = ml / rl, mr / rr
        cl = np.sqrt(gamma * pl / rl)
        cr = np.sqrt(gamma * pr / rr)
        a_l = min(vl - cl, vr - cr)
        a_r = max(vl + cl, vr + cr)
        gap = a_r - a_l
        # cone average from states, fluxes and speeds
        u0 = (a_r * rr - a_l * rl + ml - mr) / gap
        u1 = (a_r * mr - a_l * ml + (ml * vl + pl) - (mr * vr + pr)) / gap
        u2 = (a_r * er - a_l * el + vl * (el + pl) - vr * (er + pr)) / gap
        plr = (gamma - 1.0) * (u2 - 0.5 * u1 * u1 / u0)
        if u0 <= 0.0 or plr <= 0.0:
            bad[i] = True
            continue
        Sl = np.log(pl) - gamma * np.log(rl)
        Sr = np.log(pr) - gamma * np.log(rr)
        Slr = np.log(plr) - gamma * np.log(u0)
        s = (gap * (-u0 * Slr) + a_l * (-rl * Sl) - a_r * (-rr * Sr)
             + (-mr * Sr) - (-ml * Sl))
        sigma[i] = min(s, 0.0)
    return sigma, bad


def _batched_sigma(um, up, pm, pp, params):
    """sigma over trace pairs via the jitted kernel, slow-path repairs."""
    sigma, bad = _sigma_kernel(um, up, pm, pp, params.gamma)
    if np.any(bad):
        sigma_bad, _, _, _ = _euler_sigma(um[bad], up[bad], params,
                                          p_l=pm[bad], p_r=pp[bad])
        sigma[bad] = sigma_bad
    return sigma


def dissipation_rate_bound(u_l, u_r, params):
    """Single-order entropy-rate bound for one (or a batch of) trace pairs."""
    euler.check_admissible(u_l, params, where="rate bound left trace")
    euler.check_admissible(u_r, params, where="rate bound right trace")
    return _euler_sigma(u_l, u_r, params)


def _truncated_sigma(um, up, params, sigma_full):
    """Bound from truncated traces, falling back per-pair when inadmissible."""
    rho_ok = (um[..., 0] > 0.0) & (up[..., 0] > 0.0)
    p_m = (params.gamma - 1.0) * (um[..., 2] - 0.5 * um[..., 1] ** 2
                                  / np.where(um[..., 0] > 0, um[..., 0], 1.0))
    p_p = (params.gamma - 1.0) * (up[..., 2] - 0.5 * up[..., 1] ** 2
                                  / np.where(up[..., 0] > 0, up[..., 0], 1.0))
    ok = rho_ok & (p_m > 0.0) & (p_p > 0.0)
    if um.ndim > 1 and np.all(ok):
        return _batched_sigma(um, up, p_m, p_p, params), ~ok
    sigma = np.array(sigma_full, dtype=float, copy=True)
    if np.any(ok):
        um_ok = um[ok] if um.ndim > 1 else um
        up_ok = up[ok] if up.ndim > 1 else up
        sig_ok, _, _, _ = _euler_sigma(um_ok, up_ok, params)
        if um.ndim > 1:
            sigma[ok] = sig_ok
        else:
            sigma = sig_ok
    return sigma, ~ok


def interface_prediction(cell_left_nodal, cell_right_nodal, element, params,
                         truncate=None, trunc_matrix=None):
    """Entropy-rate bound between two adjacent cells from their nodal values.

    ``truncate`` defaults to active for p > 2 (below that the reduced
    branch has no order headroom); pass an explicit bool to override.
    Traces are the endpoint nodal values.
    """
    uL = np.asarray(cell_left_nodal, dtype=float)
    uR = np.asarray(cell_right_nodal, dtype=float)
    um = uL[-1]
    up = uR[0]
    sigma_p, a_l, a_r, u_lr = _euler_sigma(um, up, params)
    if truncate is None:
        truncate = element.p >= _TRUNCATION_MIN_DEGREE
    sigma_pm1 = float(sigma_p)
    fallback = False
    if truncate:
        if trunc_matrix is None:
            trunc_matrix = truncation_matrix(element, element.p - 1)
        um_t = trunc_matrix[-1] @ uL
        up_t = trunc_matrix[0] @ uR
        sigma_pm1_arr, bad = _truncated_sigma(um_t, up_t, params, sigma_p)
        sigma_pm1 = float(sigma_pm1_arr)
        fallback = bool(np.any(bad))
    sigma = min(float(sigma_p), sigma_pm1)
    return InterfacePrediction(sigma_p=float(sigma_p), sigma_pm1=sigma_pm1,
                               sigma=sigma, a_l=float(a_l), a_r=float(a_r),
                               u_lr=u_lr, truncation_fallback=fallback)


def predict_interfaces(values, um, up, element, params, truncate=None,
                       trunc_matrix=None, periodic=False, p_minus=None,
                       p_plus=None):
    """Batched sigma over all N+1 interfaces of a mesh.

    ``values`` is the (N, p+1, 3) nodal array; ``um``/``up`` are the
    full-order traces already assembled per boundary mode (shape
    (N+1, 3)), with optional precomputed trace pressures. Returns
    (sigma, n_fallbacks).
    """
    if p_minus is None:
        p_minus = euler.pressure(um, params, validate=False)
    if p_plus is None:
        p_plus = euler.pressure(up, params, validate=False)
    sigma = _batched_sigma(um, up, p_minus, p_plus, params)
    if truncate is None:
        truncate = element.p >= _TRUNCATION_MIN_DEGREE
    fallbacks = 0
    if truncate:
        if trunc_matrix is None:
            trunc_matrix = truncation_matrix(element, element.p - 1)
        # truncated endpoint traces of every cell
        left_t = np.einsum("l,nlc->nc", trunc_matrix[0], values)
        right_t = np.einsum("l,nlc->nc", trunc_matrix[-1], values)
        um_t = np.empty_like(um)
        up_t = np.empty_like(up)
        um_t[1:] = right_t
        up_t[:-1] = left_t
        if periodic:
            um_t[0] = right_t[-1]
            up_t[-1] = left_t[0]
        else:
            # equal truncated traces at the boundary: ghost cells get no
            # rate correction, so the bound there must stay idle
            um_t[0] = up_t[0] = left_t[0]
            up_t[-1] = um_t[-1] = right_t[-1]
        sigma_t, bad = _truncated_sigma(um_t, up_t, params, sigma)
        fallbacks = int(np.count_nonzero(bad))
        sigma = np.minimum(sigma, sigma_t)
    return sigma, fallbacks
