"""Exact arithmetic for Kakeya and Besicovitch sets over F_q[[t]] and Z_p at finite level."""

from .field import FieldSpec, FqElement, gf, gf_q
from .ring import (PadicInt, RingMismatchError, RingSpec, TruncatedSeries, alpha_enumeration,
                   enumerate_directions, ring_add, ring_mul, ring_neg, ring_sub, valuation)
from .besicovitch import (HSet, KSet, SolutionCount, StageSystem, assemble_K, assemble_Kn,
                          count_solutions_elim, count_solutions_naive, h_line_for_direction,
                          line_points, membership_H, star)
from .markov import (StateDistribution, alive_mass_decay, cross_validate, evolve,
                     initial_distribution, step_distribution)
from .finite import (BoundReport, PointSet, dimension_trace, f_of_u, greedy_kakeya, is_kakeya,
                     intersection_bound_check, lower_bound_ledger, minimal_kakeya_bruteforce,
                     minkowski_lower)

__all__ = [name for name in dir() if not name.startswith("_")]
