"""Test-problem catalogue and initial data.

Problems are stated in primitive variables (rho, v, p). Initial data
enters the DG scheme by nodal interpolation, with piecewise-constant
jumps placed on cell boundaries whenever the cell count divides the
domain evenly, so the t = 0 ansatz is jump-free inside every cell.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import euler
from .dg import Mesh1D, ConservedState

__all__ = ["ProblemConfig", "PROBLEM_DEFAULTS", "make_config",
           "initial_state", "fv_initial_values", "smoothwave_primitives",
           "smoothwave_exact_density", "SMOOTHWAVE_DOMAIN"]

# length 4*pi keeps sin(2x) periodic; centering on the bump puts the
# seam where the bump has decayed to ~1e-17, so the periodized data is
# smooth to round-off
SMOOTHWAVE_CENTER = 3.0
SMOOTHWAVE_DOMAIN = (SMOOTHWAVE_CENTER - 2.0 * math.pi,
                     SMOOTHWAVE_CENTER + 2.0 * math.pi)


@dataclass
class ProblemConfig:
    """Everything needed to reproduce one run."""

    problem: str
    gamma: float = 1.4
    x_left: float = 0.0
    x_right: float = 10.0
    n_cells: int = 100
    degree: int = 3
    cfl: float = None            # None: 0.1/(p^2+p)
    t_end: float = 1.8
    boundary: str = "transmissive"
    scheme: str = "ssprk43"
    truncate: bool = None        # None: active for p > 2
    out_dir: str = "out"
    fmt: str = "csv"
    samples: int = 50
    seed: int = 0
    threads: int = 1
    ref_cells: int = 3000
    growing_bump: bool = False   # smoothwave amplitude audit switch
    bump_scale: float = 1.0      # 0 turns smoothwave into a free stream

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError(f"need at least 2 cells, got {self.n_cells}")
        if self.degree < 1:
            raise ValueError(f"polynomial degree must be >= 1, got {self.degree}")
        if not self.t_end > 0.0:
            raise ValueError(f"end time must be positive, got {self.t_end}")

    def params(self):
        return euler.EulerParams(gamma=self.gamma)

    def mesh(self):
        return Mesh1D(n_cells=self.n_cells, x_left=self.x_left,
                      x_right=self.x_right, boundary=self.boundary)


def _riemann(rho_l, v_l, p_l, rho_r, v_r, p_r, split):
    def prim(x):
        x = np.asarray(x, dtype=float)
        left = x < split
        rho = np.where(left, rho_l, rho_r)
        v = np.where(left, v_l, v_r)
        p = np.where(left, p_l, p_r)
        return rho, v, p
    return prim


def _shocktube1(x):
    return _riemann(1.0, 0.0, 1.0, 0.125, 0.0, 0.1, split=5.0)(x)


def _shocktube2(x):
    return _riemann(0.445, 0.698, 3.528, 0.5, 0.0, 0.571, split=5.0)(x)


def _shuosher(x, eps=0.2):
    x = np.asarray(x, dtype=float)
    left = x < 1.0
    rho = np.where(left, 3.857153, 1.0 + eps * np.sin(5.0 * x))
    v = np.where(left, 2.629, 0.0)
    p = np.where(left, 10.333, 1.0)
    return rho, v, p


def smoothwave_primitives(x, t=0.0, growing_bump=False, bump_scale=1.0):
    """Density wave transported at speed 2 with constant v and p.

    The printed amplitude exp(+(x-3)^2) grows without bound and cannot
    be periodic; the implemented default is the Gaussian bump
    exp(-(x-3)^2). Pass growing_bump=True to audit the printed variant;
    bump_scale=0 degenerates the wave into a free stream.
    """
    lo, hi = SMOOTHWAVE_DOMAIN
    xi = lo + np.mod(np.asarray(x, dtype=float) - 2.0 * t - lo, hi - lo)
    d2 = (xi - SMOOTHWAVE_CENTER) ** 2
    eps = np.exp(d2) if growing_bump else np.exp(-d2)
    rho = 3.857153 + bump_scale * eps * np.sin(2.0 * xi)
    return rho, np.full_like(rho, 2.0), np.full_like(rho, 10.33333)


def smoothwave_exact_density(x, t, growing_bump=False, bump_scale=1.0):
    rho, _, _ = smoothwave_primitives(x, t, growing_bump=growing_bump,
                                      bump_scale=bump_scale)
    return rho


PROBLEM_DEFAULTS = {
    "shocktube1": dict(x_left=0.0, x_right=10.0, t_end=1.8,
                       boundary="transmissive"),
    "shocktube2": dict(x_left=0.0, x_right=10.0, t_end=1.2,
                       boundary="transmissive"),
    "shuosher": dict(x_left=0.0, x_right=10.0, t_end=1.8,
                     boundary="transmissive"),
    "smoothwave": dict(x_left=SMOOTHWAVE_DOMAIN[0],
                       x_right=SMOOTHWAVE_DOMAIN[1], t_end=5.0,
                       boundary="periodic"),
}


def make_config(problem, **overrides):
    """ProblemConfig with the per-problem domain/time defaults filled in."""
    if problem not in PROBLEM_DEFAULTS:
        raise ValueError(f"unknown problem {problem!r}; "
                         f"choose from {sorted(PROBLEM_DEFAULTS)}")
    merged = dict(PROBLEM_DEFAULTS[problem])
    merged.update(overrides)
    return ProblemConfig(problem=problem, **merged)


def _primitives(config, x, t=0.0):
    if config.problem == "shocktube1":
        return _shocktube1(x)
    if config.problem == "shocktube2":
        return _shocktube2(x)
    if config.problem == "shuosher":
        return _shuosher(x)
    if config.problem == "smoothwave":
        return smoothwave_primitives(x, t, growing_bump=config.growing_bump,
                                     bump_scale=config.bump_scale)
    raise ValueError(f"unknown problem {config.problem!r}")


def initial_state(config, element):
    """Nodal interpolation of the initial data on the configured mesh.

    Endpoint nodes are evaluated as one-sided limits from inside the
    cell (one ulp inward), so a jump sitting exactly on a cell boundary
    leaves both neighbors piecewise constant instead of contaminating
    the left cell with the right state.
    """
    mesh = config.mesh()
    x = mesh.node_coords(element)
    x[:, 0] = np.nextafter(x[:, 0], np.inf)
    x[:, -1] = np.nextafter(x[:, -1], -np.inf)
    rho, v, p = _primitives(config, x)
    values = euler.primitive_to_conserved(rho, v, p, config.params())
    return ConservedState(mesh=mesh, values=values, t=0.0)


def fv_initial_values(config, n_cells):
    """Cell-midpoint samples of the initial data for the FV reference."""
    dx = (config.x_right - config.x_left) / n_cells
    x = config.x_left + dx * (np.arange(n_cells) + 0.5)
    rho, v, p = _primitives(config, x)
    return euler.primitive_to_conserved(rho, v, p, config.params()), dx
