"""Numerical machinery for detecting absolutely continuous invariant
measures of one-dimensional C^r maps: reparametrization trees,
geometric/hyperbolic times, empirical measures, partition entropy."""

from .branches import (
    BranchPartition, count_branches_with_min_slope, monotone_branches,
    refine_branches,
)
from .entropy import (
    build_Qq, change_of_variable_check, choose_offset,
    entropy_formula_residual, gibbs_check, itinerary_entropy, join,
    partition_entropy, refine, verify_mane_bounds, verify_misiurewicz,
)
from .errors import (
    Acim1dError, ConfigError, EmptySelection, InsufficientAtoms,
    InverseNotBracketed, NotBounded, OffsetNotFound, TreeBudgetExceeded,
    UnresolvedCritical,
)
from .maps import (
    CIRCLE, UNIT_INTERVAL, Domain, MapNorms, OrbitRecord, SmoothMap1D,
    critical_set, estimate_norms, eval_orbit, lyapunov_ft, make_map,
    power_map,
)
from .measures import (
    EmpiricalMeasure, SamplePool, build_seed_pool, compare_density,
    density_estimate, empirical_measure, invariance_defect, select_An,
    support_gap_from_critical,
)
from .reparam import (
    BoundednessCertificate, Reparametrization, affine_reparam, check_bounded,
    choose_epsilon, distortion_ratio, split_reparam, verify_split,
)
from .times import (
    TimeSet, boundary_set, clip, geometric_times_tree,
    hyperbolic_surrogate_times, trim, verify_enm, verify_hyperbolic,
)
from .tree import ReparamTree, build_tree, verify_tree

__version__ = "0.1.0"
