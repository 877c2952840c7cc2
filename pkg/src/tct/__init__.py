"""Deadline time-cost tradeoff toolkit.

Solvers round fractional covering-LP solutions over the canonical depth
layering; exact oracles, baselines, instance families and hardness-side
constructions round out the library.  See README.md for a tour.
"""

from .model import (
    INF,
    AccelerationSet,
    CapExceededError,
    CycleError,
    FeasibilityResult,
    FractionalCover,
    InfeasibleError,
    InstanceError,
    IterationLimitError,
    LayeredView,
    NormalizedInstance,
    TctInstance,
    accelerate,
    check_feasible,
    compute_depth,
    instance_from_json,
    instance_to_json,
    layer,
    make_instance,
    solution_cost,
    solution_from_json,
    solution_to_json,
    to_rational,
)
from .normalize import (
    choice_cost,
    choice_feasible,
    denormalize_solution,
    nondominated_pairs,
    normalize,
)
from .lp import CutPool, separate_fractional, separate_integral, shrink_cut, solve_lp
from .rounding import (
    SlackVector,
    ThresholdAssignment,
    bar_yehuda_even,
    compute_slacks,
    round_deterministic,
    round_naive,
    round_randomized,
    round_slack_deterministic,
    round_slack_randomized,
    sample_threshold_assignment,
    sample_thresholds,
    sample_triple,
)
from .generators import (
    DvdInstance,
    dvd_deletion_feasible,
    dvd_depth,
    dvd_from_json,
    dvd_greedy,
    dvd_to_json,
    dvd_to_tct,
    gen_gap_instance,
    gen_path,
    gen_random_dag,
    gen_random_layered,
    gen_tournament,
    path_packing_certificate,
    tensor_with_tournament,
    verify_packing,
)
from .exact import (
    enumerate_blocker,
    enumerate_k_paths,
    exact_dvd_opt,
    exact_lp_opt,
    exact_tct_opt,
    min_cost_hitting_set,
)

__version__ = "0.1.0"
