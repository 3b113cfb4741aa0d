"""Loading-unloading mixed-mode cohesive laws and their quasistatic evolution."""

from .laws1d import (
    CohesiveLaw1D,
    ConcavityWarning,
    Cubic,
    Exponential,
    Intrinsic,
    LambdaOutOfRange,
    NegativeOpening,
    NoRoot,
    PprExtrinsic,
    PprIntrinsic,
    eval_law,
    make_intrinsic,
    ppr_parameters,
)
from .mixedmode import (
    CouplingF,
    DegenerateHistory,
    LoadingDensity,
    LoadingTension,
    Mode,
    PotentialLaw,
    Region,
    TensionLaw,
    classify_region,
    dz_phi,
    eval_phi,
    eval_psi,
    eval_s,
    eval_t,
    grad_phi,
)

__version__ = "0.1.0"
