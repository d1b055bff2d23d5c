"""Tightness of Shannon's inner and outer bounds for discrete memoryless two-way channels."""
from .channel import (ChannelError, Direction, RatePair, Twc, builtin, conditional_mi, load, relabel,
                      swap_users, validate)
from .conditions import (CONDITION_NAMES, ConditionReport, Verdict, check_all, check_cva, check_shannon_symmetry,
                         check_thm1, check_thm2, check_thm3, check_thm4, replay_witness)
from .probcore import (ProbabilityError, binary_entropy, entropy, functional_H, functional_Hbar, functional_Hperp,
                       functional_I)
from .region import (GridSpec, RateRegion, RegionError, capacity_region, hausdorff_distance, inner_bound,
                     outer_bound)
from .solver import ba_capacity, common_maximizer, maximin_input

__all__ = [n for n in dir() if not n.startswith("_")]
