"""Composition operators on the Schwartz space: symbols, multipliers, closed range and witnesses."""

__version__ = "0.1.0"

from .closed_range import AssumptionSet, ClosedRangeVerdict, decide
from .config import DEFAULT, Config, load_config
from .expr import PiecewiseFn, differentiate, evaluate, parse, smoothness_check, to_text
from .faa_di_bruno import Composition, compose_derivative, enumerate_partitions, fdb_coefficient
from .multipliers import ClosedRangeParams, check_conditions_ab, closed_range_multiplier, find_zeros
from .norms import d_norm, membership_S, seminorm_pi
from .symbols import analyze_symbol, check_condition_i, check_condition_ii, check_limit_infinity, is_symbol
from .verdict import Status, Verdict
from .witnesses import (build_witness_cond_i, build_witness_cond_ii, lemma1_witness, make_bump, noncompact_family,
                        norm_gap_function)
