"""Pseudo-spectral Navier-Stokes solver with regularity-criterion monitors.

Velocity arrays have shape (3, n, n, n) indexed [component, z, y, x].
"""

from ._core import (
    ConfigError,
    DegenerateField,
    Error,
    NumericalBlowup,
    calibrate,
    chan_vasseur_integrand,
    gn_ratio,
    h2_identity_residual,
    holder_check,
    init_field,
    log_serrin_integrand,
    lp_norm,
    read_snapshot,
    report,
    run,
    serrin_integrand,
    simulate,
    sobolev_seminorm,
    verify,
    young_constant,
)

__all__ = [
    "ConfigError",
    "DegenerateField",
    "Error",
    "NumericalBlowup",
    "calibrate",
    "chan_vasseur_integrand",
    "gn_ratio",
    "h2_identity_residual",
    "holder_check",
    "init_field",
    "log_serrin_integrand",
    "lp_norm",
    "read_snapshot",
    "report",
    "run",
    "serrin_integrand",
    "simulate",
    "sobolev_seminorm",
    "verify",
    "young_constant",
]
