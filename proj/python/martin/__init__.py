"""Numerical potential theory for Martin functions."""

from ._core import (
    ConfigError,
    Field,
    SolverError,
    __version__,
    decay_fit,
    harmonicity_residual,
    level_curves,
    level_set_convexity,
    make_field,
    martin_ratio,
    run_cli,
    slice_scan,
    tangent_hessian_form,
)

__all__ = [
    "ConfigError",
    "Field",
    "SolverError",
    "__version__",
    "decay_fit",
    "harmonicity_residual",
    "level_curves",
    "level_set_convexity",
    "make_field",
    "martin_ratio",
    "run_cli",
    "slice_scan",
    "tangent_hessian_form",
]
