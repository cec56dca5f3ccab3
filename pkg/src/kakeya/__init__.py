"""Exact finite-stage constructions of sticky and non-sticky Kakeya sets."""
from .assembly import LineParam, ParamFamily, area_estimate, line_distance, line_point, rotation_cover, slice_at
from .dimension import CubeCounts, box_count, cube_entropy, hausdorff_upper_bound, packing_lower_ratio
from .grid import CellSet, IntervalUnion, ProductUnion, normalize, union_measure
from .moran import (
    RoundPattern,
    StageState,
    apply_round,
    build_state,
    make_round_pattern,
    pi0_cover,
    verify_conditions,
)
from .projections import DIAG_MINUS, DIAG_PLUS, ProjectionSpec, diag_measure_bound, project
from .schedule import Schedule, build_schedule, minimal_m, minimal_next_n
from .sticky import c0_dimension_counts, c0_stage, minkowski_sum, sticky_param_product_check, sticky_slice

__version__ = "0.1.0"
