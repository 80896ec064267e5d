"""Fair and efficient allocation of identical indivisible goods among weighted agents."""

from .core import (
    Allocation,
    DomainError,
    EqallocError,
    FairnessResult,
    IncompleteAllocation,
    LimitsExceeded,
    Linear,
    Log,
    NonConcaveUtility,
    NonIntegerData,
    Power,
    Scenario,
    SolverError,
    Tabulated,
    UnreachableValue,
    UnsupportedScenario,
    UtilityFunction,
    ValidationError,
    VerificationFailed,
    WelfareReport,
    ceil_inverse,
    check_allocation,
    check_concave,
    check_fairness,
    total_weighted_deficit,
    welfare_report,
)
from .deficit import (
    CoinPlan,
    DeficitResult,
    coin_compensation,
    psi,
    psi_multitype,
    psi_p,
    psi_p_incremental,
    psi_per_type,
)
from .io import load_scenario, loads_scenario, scenario_from_dict, scenario_to_dict
from .oracle import OracleLimits, enumerate_allocations, oracle_best, oracle_min_coins, oracle_wmms
from .shares import compute_wmms_shares, construct_balanced_efx, construct_wefx, decide_wmms
from .welfare import (
    solve_leximin,
    solve_maximin,
    solve_nash,
    solve_restricted_utilitarian,
    solve_utilitarian,
)

__version__ = "0.1.0"
