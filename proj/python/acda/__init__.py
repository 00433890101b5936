"""Allen-Cahn nudging data assimilation: solver, observation sets, experiments."""

from ._acda import (
    DivergenceError,
    ObservationSet,
    SolverConfig,
    assimilate,
    find_min_nodes,
    fit_power_law,
    initial_data,
    interpolate,
    l2_norm,
    layer_placement,
    length_scale,
    main,
    spin_up,
    step,
    velocity_sweep,
)

__all__ = [
    "DivergenceError",
    "ObservationSet",
    "SolverConfig",
    "assimilate",
    "find_min_nodes",
    "fit_power_law",
    "initial_data",
    "interpolate",
    "l2_norm",
    "layer_placement",
    "length_scale",
    "main",
    "spin_up",
    "step",
    "velocity_sweep",
]
