"""Areas, logarithmic capacities and condenser capacities of polynomial
lemniscates and preimages, with numerical checks of the governing
inequalities."""

from .errors import (
    BudgetTooSmall,
    DegenerateBoundary,
    EmptyRegion,
    FormatError,
    LemlabError,
    NonConvergence,
    NotMonic,
    ResolutionTooCoarse,
    SolveFailure,
    ThinPlate,
)
from .polynomial import Polynomial, PreimageSet, escape_radius, preimages, roots
from .region import (
    Annulus,
    AreaEstimate,
    Disc,
    PixelMask,
    Polygon,
    Preimage,
    Region,
    SamplingBudget,
    Sublevel,
    UnionRegion,
    area,
    bounding_disc,
    contains,
    pixelize,
    preimage_region,
    scale_region,
    sublevel_region,
    translate_region,
)
from .capacity import (
    CapacityEstimate,
    Condenser,
    GridFunction,
    condenser_capacity,
    dirichlet_energy,
    log_capacity,
    pullback_condenser,
    schwarz_symmetrize,
)
from .theorems import (
    Report,
    RoundnessValue,
    mass_integral,
    multiplicity_area,
    roundness,
    sublevel_threshold,
    verify_capacity_pullback,
    verify_carleman,
    verify_integrated_carleman,
    verify_isoperimetric,
    verify_main,
    verify_multiplicity,
    verify_polya,
    verify_pullback_lemma,
    verify_roundness,
    verify_threshold_bound,
    STATEMENT_IDS,
)
from .sweep import SweepConfig, SweepResult, run_sweep

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
