"""High-order ARX identification of possibly-unstable plants in closed loop.

The toolkit simulates closed-loop data, fits high-order ARX models by least
squares, and recovers the plant, a corrected stable noise model, and the
innovation variance by factoring the anti-stable roots out of the estimated
A polynomial and dividing the attained cost by the resulting constant
all-pass gain.
"""

from .arxfit import ArxEstimate, ArxOrders, estimate_arx, residuals
from .errors import (
    AlgebraicLoop,
    ArxidError,
    InverselyUnstableH,
    NotAntiStable,
    PoleOnGrid,
    RankDeficient,
    RootOnUnitCircle,
    UnstableClosedLoop,
    UnstableExpansion,
    UnstableZ,
    ZeroPolynomial,
)
from .expcli import (
    ExperimentConfig,
    GridSpec,
    MonteCarloSummary,
    cmd_bode,
    cmd_montecarlo,
    cmd_single,
    default_montecarlo_config,
    default_single_config,
    default_system,
    main,
)
from .ltisys import (
    FreqGrid,
    RationalTF,
    SystemSpec,
    closed_loop_char_poly,
    closed_loop_paths,
    freq_response,
    is_stable,
    make_G,
    make_H,
    sensitivity,
)
from .oracle import CostDecomposition, power_series, quadrature_cost, verify_proposition1
from .polyq import (
    Poly,
    RootSet,
    allpass_gain,
    classify_root,
    factor_stable_antistable,
    mirror,
    poly_add,
    poly_mul,
    roots,
)
from .recoverkit import (
    ComparisonReport,
    RecoveredModel,
    compare_models,
    recover,
    theoretical_minimizers,
)
from .simkit import (
    SignalRecord,
    derive_run_seed,
    filter_closed_loop,
    gaussian_white,
    simulate_closed_loop,
)

__version__ = "0.1.0"
