"""Markovian spherical averages of free-group actions.

Verification and computation toolkit: exact-rational labeled Markov
systems, admissibility certificates, finite-word tail-map identities,
and windowed mean ergodic convergence on finite actions.
"""

from .freegroup import (
    FormatError,
    ReducedWord,
    SubgroupGraph,
    fold,
    format_word,
    invert,
    multiply,
    parse_word,
    reduce,
)
from .chain import (
    MarkovSystem,
    ReducibleChainError,
    StationaryDistribution,
    builtin_surface,
    builtin_uniform,
    chain_from_dict,
    chain_to_dict,
    load_chain,
    save_chain,
)
from .admissibility import (
    AdmissibilityReport,
    GoodSubgraphCertificate,
    SufficiencyResult,
    check_admissible,
    find_good_subgraph,
    is_strongly_connected,
    loop_subgroup_generators,
    loop_subgroup_is_full,
    sufficient_condition,
    validate_certificate,
)
from .action import (
    FiniteAction,
    act,
    builtin_parity,
    builtin_zmod,
    conditional_expectation,
    is_ergodic,
    load_action,
    orbits,
    save_action,
)
from .tailmaps import (
    DegenerateWindowError,
    InsufficientOccurrencesError,
    ShiftedPair,
    block_swap,
    check_tail_maps,
    occurrence_time,
    occurrences,
    swap_then_rewrite,
    tail_cocycle,
    tail_rewrite,
    weight_ratio_bound,
    word_distance,
)
from .operators import (
    ConvergenceReport,
    convergence_series,
    l1_norm,
    l1_norm_lifted,
    lift,
    markov_step,
    spherical,
    spherical_direct,
    window_average,
)

__version__ = "0.1.0"
