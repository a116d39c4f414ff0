"""Geometric SE(3) quadrotor control and simulation (C++ core)."""

from ._core import (
    GeoquadError,
    attitude_error,
    check,
    config_to_json,
    exp_so3,
    hat,
    mixing_from_rotors,
    mixing_matrix,
    mixing_to_rotors,
    parse_config,
    psi,
    reference_params,
    run,
    scenario_names,
    trace_columns,
    vee,
)

__all__ = [
    "GeoquadError",
    "attitude_error",
    "check",
    "config_to_json",
    "exp_so3",
    "hat",
    "mixing_from_rotors",
    "mixing_matrix",
    "mixing_to_rotors",
    "parse_config",
    "psi",
    "reference_params",
    "run",
    "scenario_names",
    "trace_columns",
    "vee",
]
