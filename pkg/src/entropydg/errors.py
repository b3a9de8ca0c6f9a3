"""Exception types shared across the solver."""


class InadmissibleStateError(ValueError):
    """A conserved state left the admissible set (rho > 0, pressure > 0).

    ``cell`` and ``node`` locate the first offending value when the check
    ran on mesh-shaped data; they stay ``None`` for pointwise checks.
    """

    def __init__(self, message, cell=None, node=None, stage=None):
        super().__init__(message)
        self.cell = cell
        self.node = node
        self.stage = stage


class DegenerateSpeedsError(ValueError):
    """Signal-speed bounds collapsed (a_r - a_l below round-off)."""


class BracketFailureError(RuntimeError):
    """No positivity time found inside the bisection bracket."""
