"""Fairness tools for the k-server problem: online algorithms, offline optimum,
fair transformations and audits, all in exact rational arithmetic."""
from .fairness_audit import (
    FairnessReport,
    acceptable_ratio,
    additive_gap,
    alpha_beta_residual,
    audit,
    egalitarian_cost,
    multiplicative_ratio,
)
from .instances import (
    Instance,
    gen_dca_hard,
    gen_lru_hard,
    gen_random_finite,
    gen_random_line,
    gen_random_tree,
    gen_random_uniform,
)
from .metric_spaces import (
    EdgePoint,
    FiniteMetric,
    LineMetric,
    TreeMetric,
    UniformMetric,
    Vertex,
    diameter,
    distance,
    far_point,
    point_on_path,
    tree_path,
    validate,
)
from .offline_fair import beta, fair_transform, find_split, swap_suffix
from .offline_opt import OptSolution, belady_faults, opt_bruteforce, opt_solve
from .online_core import DCA, FIFO, LRU, Balance, Greedy, Marking, make_algorithm, phase_partition, run
from .online_fair import (
    acceptable_to_multiplicative,
    end_aware_additive,
    online_additive_2diam,
    phased_swap_wrap,
)
from .schedules import CostLedger, Schedule, Trace, ledger_from_schedule, verify_schedule

__version__ = "0.1.0"
