"""Exception types raised by the model and pipeline layers."""

from __future__ import annotations


class ModelError(Exception):
    """Base class for physics-layer errors."""


class AdiabaticEliminationError(ModelError):
    """Raised when a formula requires a nonzero one-photon detuning."""


class SingularParameterError(ModelError):
    """Raised when a closed-form expression is evaluated at a pole."""


class DegenerateDriveError(ModelError):
    """Raised when a susceptibility is requested for a vanishing drive."""


class DegenerateSteadyStateError(ModelError):
    """Raised when the generator kernel is not one-dimensional."""


class IntegrationError(ModelError):
    """Step-size underflow or solver failure during time evolution."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (t = {t_fail:.6e} s)")
        self.t_fail = t_fail


class CascadeError(ModelError):
    """Propagation through the atom array failed at a given site."""

    def __init__(self, message: str, atom_index: int):
        super().__init__(f"{message} (atom index {atom_index})")
        self.atom_index = atom_index


class FitConvergenceError(ModelError):
    """Nonlinear fit did not converge; carries the best parameters seen."""

    def __init__(self, message: str, best_params=None):
        super().__init__(message)
        self.best_params = best_params


class ConfigError(Exception):
    """Invalid or incomplete scenario configuration."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key
