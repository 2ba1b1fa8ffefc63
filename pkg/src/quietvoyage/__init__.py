"""quietvoyage: voyage planning that minimizes underwater noise exposure.

The engine plans a ship route and per-leg speed profile that minimize the
cumulative sound exposure simulated marine mammals receive, then replays
baseline and optimized voyages with quantitative footprint reports.
"""

__version__ = "0.1.0"

from .geo import (
    BathymetryGrid,
    GeoPoint,
    PlanarPoint,
    RegionMask,
    blocked_fraction,
    from_planar,
    is_navigable,
    to_planar,
)
from .planner import PlannerConfig, Route, Se2State, plan_route, route_cost
from .propagation import (
    PcaBasis,
    RbfInterpolant,
    TlFieldCache,
    pca_fit,
    pca_project,
    pca_reconstruct,
    precompute_field,
    rbf_eval,
    rbf_fit,
    received_level,
    synth_tl,
)
from .sim import EventLog, FootprintReport, compare, footprint, reduction_percent, run_voyage
from .source import (
    BAND_CENTERS_HZ,
    ShipClass,
    ShipSpec,
    baseline_spectrum,
    broadband_level,
    reference_speed,
    source_level,
    source_spectrum,
)
from .speed import (
    ExposureLedger,
    GaConfig,
    SpeedProfile,
    VoyageConstraints,
    objective,
    optimize_speeds,
    penalized_fitness,
    sel_total,
    tdt,
)
from .wildlife import KdeModel, MammalState, init_population, kde_fit, kde_pdf, kde_sample, step_trajectory

__all__ = [
    "BAND_CENTERS_HZ",
    "BathymetryGrid",
    "EventLog",
    "ExposureLedger",
    "FootprintReport",
    "GaConfig",
    "GeoPoint",
    "KdeModel",
    "MammalState",
    "PcaBasis",
    "PlanarPoint",
    "PlannerConfig",
    "RbfInterpolant",
    "RegionMask",
    "Route",
    "Se2State",
    "ShipClass",
    "ShipSpec",
    "SpeedProfile",
    "TlFieldCache",
    "VoyageConstraints",
    "baseline_spectrum",
    "blocked_fraction",
    "broadband_level",
    "compare",
    "footprint",
    "from_planar",
    "init_population",
    "is_navigable",
    "kde_fit",
    "kde_pdf",
    "kde_sample",
    "objective",
    "optimize_speeds",
    "pca_fit",
    "pca_project",
    "pca_reconstruct",
    "penalized_fitness",
    "plan_route",
    "precompute_field",
    "rbf_eval",
    "rbf_fit",
    "received_level",
    "reduction_percent",
    "reference_speed",
    "route_cost",
    "run_voyage",
    "sel_total",
    "source_level",
    "source_spectrum",
    "step_trajectory",
    "synth_tl",
    "tdt",
    "to_planar",
]
