"""Entropy-rate correction of the DG time derivative.

Two passes on top of the uncorrected right-hand side:

* per cell, lambda_ED enforces the cell entropy inequality
  <dU/du, du/dt>_w <= F*_l - F*_r;
* per interface, lambda_ER pushes the combined rate of the two adjacent
  cells down to the interface dissipation bound sigma.

Every division is the Tikhonov-regularized ratio max(a b / (b^2 + c^2), 0)
with c = 1e-8, and the summed correction size is clamped at
lambda_max = 1/dt before the filtered direction G u is added:

    du/dt <- du/dt + min(lambda_max, lambda_ED + sum lambda_ER) G u.

The direction never changes cell means (w^T G = 0), so the correction
is conservative by construction.
"""

from dataclasses import dataclass

import numpy as np

from . import euler
from .dg import semidiscrete_rhs
from .element import truncation_matrix
from .predictor import predict_interfaces

__all__ = ["CorrectionReport", "stable_ratio", "cell_dissipation_correction",
           "interface_rate_correction", "admissibility_margin",
           "corrected_rhs"]

REGULARIZATION = 1e-8   # sqrt of machine precision for unit-scaled data
POSITIVITY_MARGIN = 0.1  # filter floor engages below this relative margin


@dataclass
class CorrectionReport:
    """Per-evaluation record of correction sizes and entropy residuals."""

    lambda_ed: np.ndarray        # (N,)
    lambda_er: np.ndarray        # (N+1,) per interface
    lambda_total: np.ndarray     # (N,) clamped combined size
    residual_before: np.ndarray  # (N,) r_T of the raw DG derivative
    residual_after: np.ndarray   # (N,) r_T after correction
    sigma: np.ndarray            # (N+1,) interface rate bounds
    violation_pos: float         # max positive residual_after
    truncation_fallbacks: int = 0
    floored_cells: int = 0       # cells where the positivity floor engaged
    violation_rel: float = 0.0   # violation_pos relative to the cell scale


def stable_ratio(a, b, c):
    """max(a*b / (b^2 + c^2), 0): regularized, clipped division a/b.

    The ratio is invariant under joint rescaling of (a, b, c), so the
    inputs are normalized first; the result stays finite for any finite
    arguments.
    """
    if np.any(np.asarray(c) <= 0.0):
        raise ValueError("regularization constant must be positive")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.maximum(np.abs(b), c)
    bn = b / s
    cn = c / s
    t = bn / (bn * bn + cn * cn)  # |t| <= 1 by construction
    out = np.maximum((a * t) / s, 0.0)
    out = np.minimum(out, np.finfo(float).max)
    return out if out.ndim else float(out)


def cell_dissipation_correction(residual, direction_rate, c=REGULARIZATION):
    """lambda_ED from the cell residual r_T and D_T = <dU/du, G u>_w."""
    return stable_ratio(-np.asarray(residual), direction_rate, c)


def interface_rate_correction(sigma, r_post_left, r_post_right,
                              d_left, d_right, c=REGULARIZATION):
    """lambda_ER from the bound and the two adjacent post-ED cell rates."""
    num = np.asarray(sigma) - (np.asarray(r_post_left) + np.asarray(r_post_right))
    den = np.asarray(d_left) + np.asarray(d_right)
    return stable_ratio(num, den, c)


def admissibility_margin(values, element, params, p_nodal=None):
    """Smallest nodal density/pressure relative to the cell-mean state.

    1 means comfortably admissible, 0 means a node sits on the vacuum
    boundary. The filter preserves cell means, so pulling nodal values
    toward the mean always raises this margin.
    """
    w = element.weights
    mean = np.einsum("k,nkc->nc", w, values) / w.sum()
    rho_bar = np.maximum(mean[:, 0], 1e-300)
    p_bar = (params.gamma - 1.0) * (mean[:, 2]
                                    - 0.5 * mean[:, 1] ** 2 / rho_bar)
    p_bar = np.maximum(p_bar, 1e-300)
    if p_nodal is None:
        p_nodal = (params.gamma - 1.0) * (values[..., 2]
                                          - 0.5 * values[..., 1] ** 2
                                          / values[..., 0])
    return np.minimum(values[..., 0].min(axis=1) / rho_bar,
                      p_nodal.min(axis=1) / p_bar)


def corrected_rhs(state, element, filt, params, lambda_max,
                  truncate=None, trunc_matrix=None, c=REGULARIZATION,
                  positivity_margin=POSITIVITY_MARGIN):
    """DG right-hand side with the entropy-rate correction applied.

    Returns the corrected RhsBundle together with a CorrectionReport.
    ``lambda_max`` should be 1/dt of the enclosing time step.

    Cells whose nodal density or pressure drops below ``positivity_margin``
    times the cell-mean values additionally receive a filter floor that
    ramps up to lambda_max as the margin closes. The entropy bookkeeping
    cannot see a node approaching vacuum (the interface dissipation there
    makes the cell look over-compliant), so without the floor strong
    shocks at high degree drive an interface node to negative density at
    a rate independent of the CFL number. The floor only ever adds
    entropy dissipation and never changes cell means.
    """
    mesh = state.mesh
    u = state.values
    bundle = semidiscrete_rhs(state, element, params)
    w = euler.entropy_variables(u, params, validate=False,
                                p=bundle.nodal_pressure)
    halfdx_w = 0.5 * mesh.dx * element.weights

    # correction direction: generator applied per cell and component
    direction = np.einsum("kl,nlc->nkc", filt.generator, u)

    # cell entropy rates against the numerical entropy flux balance
    rate = np.einsum("k,nkc,nkc->n", halfdx_w, w, bundle.dudt)
    dF = bundle.iface_entropy_flux[:-1] - bundle.iface_entropy_flux[1:]
    residual = rate - dF
    d_rate = np.einsum("k,nkc,nkc->n", halfdx_w, w, direction)

    lam_ed = cell_dissipation_correction(residual, d_rate, c)
    r_post = residual + lam_ed * d_rate

    if truncate is None:
        truncate = element.p >= 3
    if truncate and trunc_matrix is None:
        trunc_matrix = truncation_matrix(element, element.p - 1)
    sigma, fallbacks = predict_interfaces(
        u, bundle.traces_minus, bundle.traces_plus, element, params,
        truncate=truncate, trunc_matrix=trunc_matrix, periodic=mesh.periodic,
        p_minus=bundle.trace_pressure_minus,
        p_plus=bundle.trace_pressure_plus)

    n = mesh.n_cells
    lam_er = np.zeros(n + 1)
    if mesh.periodic:
        r_left = np.concatenate(([r_post[-1]], r_post))
        r_right = np.concatenate((r_post, [r_post[0]]))
        d_left = np.concatenate(([d_rate[-1]], d_rate))
        d_right = np.concatenate((d_rate, [d_rate[0]]))
        lam_er = interface_rate_correction(sigma, r_left, r_right,
                                           d_left, d_right, c)
    else:
        # boundary interfaces touch a ghost cell that cannot receive a
        # correction; no rate correction is attached there
        lam_er[1:-1] = interface_rate_correction(
            sigma[1:-1], r_post[:-1], r_post[1:], d_rate[:-1], d_rate[1:], c)

    lam_total = np.minimum(lambda_max, lam_ed + lam_er[:-1] + lam_er[1:])

    floored = 0
    if positivity_margin > 0.0:
        margin = admissibility_margin(u, element, params,
                                      p_nodal=bundle.nodal_pressure)
        lam_floor = lambda_max * np.clip(1.0 - margin / positivity_margin,
                                         0.0, 1.0)
        floored = int(np.count_nonzero(lam_floor > lam_total))
        lam_total = np.maximum(lam_total, lam_floor)

    bundle.dudt += lam_total[:, None, None] * direction
    residual_after = residual + lam_total * d_rate

    # positive residuals relative to the mesh entropy-rate scale. The
    # regularization constant is sized for unit-scaled solutions, so the
    # leftover violation of a direction-degenerate cell (|D| ~ c) is dust
    # on the problem scale, not on the cell's own near-zero balance.
    rate_scale = float((np.abs(rate) + np.abs(dF)).max()) + 1e-300
    violation_rel = float(np.maximum(residual_after, 0.0).max() / rate_scale)

    report = CorrectionReport(
        lambda_ed=lam_ed, lambda_er=lam_er, lambda_total=lam_total,
        residual_before=residual, residual_after=residual_after,
        sigma=sigma, violation_pos=float(np.maximum(residual_after, 0.0).max()),
        truncation_fallbacks=fallbacks, floored_cells=floored,
        violation_rel=violation_rel)
    return bundle, report
