"""Small-strain quasicrystal dynamics simulator."""

from ._core import (
    EXIT_CONFIG,
    EXIT_GATE,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    MaterialParams,
    NumericalFailure,
    canonical_config,
    check_admissibility,
    derive_coefficients,
    energy_form_min_eigenvalue,
    run,
    run_scenario,
    scenario_config_text,
    scenario_names,
    simulate,
)

__all__ = [
    "EXIT_CONFIG",
    "EXIT_GATE",
    "EXIT_IO",
    "EXIT_NUMERICAL",
    "EXIT_OK",
    "MaterialParams",
    "NumericalFailure",
    "canonical_config",
    "check_admissibility",
    "derive_coefficients",
    "energy_form_min_eigenvalue",
    "run",
    "run_scenario",
    "scenario_config_text",
    "scenario_names",
    "simulate",
]
