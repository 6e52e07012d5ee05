"""Services für Modelle, Paritätssysteme, Löser, Orakel und WISH."""
from .binarization import binarize, decode, log_weight, log_weights, power_model
from .generators import GridMode, generate_clique_ising, generate_grid_ising
from .oracle import (
    brute_force_log_z,
    brute_force_quantiles,
    brute_force_tail,
    level_bracket_frequency,
    lemma2_check,
)
from .parity_service import (
    IncrementalPropagator,
    dump_system,
    evaluate,
    parse_system_dump,
    propagate,
    row_reduce,
    sample_parity_system,
)
from .solver import BranchAndBoundSolver, brute_force_map, solve, upper_bound
from .uai_parser import UaiParser, model_digest, parse_uai, write_uai
from .wish_service import (
    WishService,
    aggregate,
    classify_guarantee,
    compute_T,
    estimate_log_w,
    estimate_tail,
    level_statistics,
    refine,
    run_wish,
)

__all__ = [
    "UaiParser",
    "parse_uai",
    "write_uai",
    "model_digest",
    "binarize",
    "decode",
    "log_weight",
    "log_weights",
    "power_model",
    "GridMode",
    "generate_clique_ising",
    "generate_grid_ising",
    "sample_parity_system",
    "evaluate",
    "row_reduce",
    "propagate",
    "IncrementalPropagator",
    "dump_system",
    "parse_system_dump",
    "BranchAndBoundSolver",
    "solve",
    "brute_force_map",
    "upper_bound",
    "brute_force_log_z",
    "brute_force_quantiles",
    "brute_force_tail",
    "lemma2_check",
    "level_bracket_frequency",
    "WishService",
    "compute_T",
    "run_wish",
    "aggregate",
    "classify_guarantee",
    "estimate_log_w",
    "estimate_tail",
    "refine",
    "level_statistics",
]
