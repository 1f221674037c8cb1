"""Jump sets, jump measures and Poisson-law checks for regulated paths."""

from .borel import BorelSet, Interval
from .errors import ConfigError, DomainError, JumpMeasureError, NotInBStarError, NumericError
from .levy import (
    FixedListLaw, JumpLaw, NormalLaw, SimConfig, SymmetricExponentialLaw, ThetaLaw, TwoPointLaw,
    nu, simulate_compound_poisson, simulate_ladlag, simulate_path,
)
from .measure import (
    Integral, ProductSet, Rectangle, counting_process, integrate, integrate_by_scan,
    jump_sum_process, measure,
)
from .path import (
    JumpEvent, LayeredDecomposition, RegulatedPath, Side, enumerate_finite_set, evaluate,
    jump_at, jump_set_eps, layered_decomposition,
)
from .thin import (
    INF, StoppingSequence, check_disjoint_exhaustion, exhaust_global, exhaust_restricted,
    exhaust_restricted_filter, first_hitting_times,
)
from .verify import GofReport, SimulationReport, verify_compound_mean, verify_poisson_law

__version__ = "0.1.0"
