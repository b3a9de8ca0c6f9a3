"""Time integrators and the CFL step-size rule.

SSPRK(4,3) is the workhorse: four forward-Euler substeps of size dt/2
plus one convex recombination, so every property provable for a single
Euler step (in particular filter positivity) transfers to the full
step. The eighth-order Dormand-Prince method is provided fixed-step for
convergence studies where the temporal error must be negligible.
"""

from dataclasses import dataclass

import numpy as np

from . import euler
from ._dop853 import A as _RK8_A, B as _RK8_B, N_STAGES as _RK8_STAGES
from .errors import InadmissibleStateError

__all__ = ["StepController", "default_cfl", "compute_dt", "ssprk43_step",
           "rk8_step", "SCHEMES"]


def default_cfl(p):
    """CFL number 0.1 / (p^2 + p) used for the corrected DG runs."""
    return 0.1 / (p * p + p)


def compute_dt(values, params, cfl, dx, t_remaining=None):
    """dt = cfl * dx / max(|v| + c), truncated to land on t_end exactly."""
    c_max = float(np.max(euler.max_signal_speed(values, params)))
    dt = cfl * dx / c_max
    if t_remaining is not None:
        dt = min(dt, t_remaining)
    return dt


@dataclass
class StepController:
    """Step-size bookkeeping for a run."""

    cfl: float
    scheme: str = "ssprk43"
    dt_current: float = 0.0

    def next_dt(self, values, params, dx, t_remaining):
        self.dt_current = compute_dt(values, params, self.cfl, dx, t_remaining)
        return self.dt_current


def _stage_eval(rhs, y, stage):
    try:
        return rhs(y)
    except InadmissibleStateError as exc:
        exc.stage = stage
        raise


def ssprk43_step(y, rhs, dt):
    """One SSPRK(4,3) step (Spiteri-Ruuth): y_{n+1} from y_n.

    Stages: three half-dt Euler substeps, a 2/3-1/3 convex recombination,
    then one more half-dt Euler substep.
    """
    h = 0.5 * dt
    y1 = y + h * _stage_eval(rhs, y, 1)
    y2 = y1 + h * _stage_eval(rhs, y1, 2)
    y3 = (2.0 / 3.0) * y + (1.0 / 3.0) * (y2 + h * _stage_eval(rhs, y2, 3))
    return y3 + h * _stage_eval(rhs, y3, 4)


def rk8_step(y, rhs, dt):
    """One fixed-size step of the eighth-order Dormand-Prince solution."""
    k = [None] * _RK8_STAGES
    k[0] = _stage_eval(rhs, y, 1)
    for i in range(1, _RK8_STAGES):
        yi = y.copy()
        for j in range(i):
            a = _RK8_A[i, j]
            if a != 0.0:
                yi += (dt * a) * k[j]
        k[i] = _stage_eval(rhs, yi, i + 1)
    out = y.copy()
    for i in range(_RK8_STAGES):
        b = _RK8_B[i]
        if b != 0.0:
            out += (dt * b) * k[i]
    return out


SCHEMES = {"ssprk43": ssprk43_step, "rk8": rk8_step}
