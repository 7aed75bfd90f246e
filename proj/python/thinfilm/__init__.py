"""Python access to the thin-film solver core."""

from ._thinfilm import (
    Problem,
    ThinfilmError,
    band_edge,
    bihari_bound,
    classify_regime,
    critical_mass,
    energy,
    entropy,
    growth_rate,
    mobility,
    parse_config,
    pressure_coupling,
    run_command,
    theorem_flags,
)

__all__ = [
    "Problem",
    "ThinfilmError",
    "band_edge",
    "bihari_bound",
    "classify_regime",
    "critical_mass",
    "energy",
    "entropy",
    "growth_rate",
    "mobility",
    "parse_config",
    "pressure_coupling",
    "run_command",
    "theorem_flags",
]
