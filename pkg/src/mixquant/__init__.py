"""Optimal n-means for the equal-weight mixture of U[0,1] and U[1/2,3/2]."""

__version__ = "0.1.0"

from .density import (  # noqa: E402
    StepDensity,
    ZeroMassError,
    conditional_mean,
    distortion,
    measure,
    mixture_density,
    moments,
    reflect,
)
from .mixed import (  # noqa: E402
    InfeasibleSplitError,
    QuantizationResult,
    SolverError,
    SplitConfig,
    best_split,
    small_n,
    solve_split,
    split_error,
)
from .oracle import OracleReport, lloyd, verify  # noqa: E402
from .selector import SelectorTrace, seed_sequence, select_k, solve  # noqa: E402
from .uniform import UniformPiece, endpoint_constrained, uniform_optimal  # noqa: E402
