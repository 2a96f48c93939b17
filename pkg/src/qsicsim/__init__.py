"""Exact-arithmetic simulation and minimum-memory analysis of sequential
projective measurements on state-independent contextuality sets."""

from .errors import (
    DimensionMismatch,
    InsufficientData,
    NonUniqueStationary,
    ParseError,
    QsicError,
    ResourceLimit,
    Truncated,
    TruncationExceeded,
    ValidationError,
    ZeroProbabilityBranch,
    ZeroVector,
)
from .exact import (
    BigRational,
    CanonicalRay,
    GaussianRational,
    canonicalize,
    gaussian_gcd,
    ray_from_string,
    rays_equal,
)
from .measurements import (
    DichotomicObservable,
    Measurement,
    Outcome,
    RankOneProjector,
    commute,
    outcome_probability,
    post_measurement_state,
)
from .sets import QsicSet, load_set, peres_mermin, pm_eigenstates, pm_eigenstate_signatures, yu_oh
from .evolve import (
    CurvePoint,
    EntropyCurve,
    StateDistribution,
    entropy_curve,
    entropy_of,
    evolve_step,
    iter_distributions,
    noncontextual_baseline,
    reachable_counts,
)
from .transducer import (
    DistinguishabilityReport,
    Transducer,
    build_transducer,
    export_dot,
    past_sufficiency,
    stationary_distribution,
    verify_distinguishability,
    verify_unifilar,
)
from .sampling import (
    EquivalenceReport,
    Trace,
    compare_statistics,
    read_trace,
    run_classical,
    sample_classical,
    sample_quantum,
    write_trace,
)

__version__ = "0.1.0"
