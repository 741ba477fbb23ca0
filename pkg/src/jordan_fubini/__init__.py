"""Riemann integration over Jordan domains and Fubini-type iterated integrals.

Domains are classified on dyadic grids, fields carry cell bounds, and
inner integrals are taken over slices with an eps-cover of the boundary
(or of the discontinuity set) removed.
"""
from .analysis import (
    Applicability,
    LineIntersections,
    OscillationMap,
    discontinuity_cover,
    discontinuity_covers,
    oscillation_map,
    theorem5_applicability,
    vertical_line_intersections,
)
from .errors import (
    CoverNotAchievable,
    DepthTooLarge,
    FubiniError,
    LevelTooDeep,
    UnknownDomainName,
    UnknownFieldName,
)
from .fields import (
    FatCantorSet,
    ScalarField2D,
    builtin_fields,
    fat_cantor_build,
    fat_cantor_contains,
    fat_cantor_measure,
    field_from_spec,
    paper_example_field,
)
from .geometry import (
    BoundingRect,
    CellGrid,
    CellTag,
    EpsCover,
    JordanDomain,
    Membership,
    SliceSet,
    annulus_domain,
    build_eps_cover,
    build_eps_covers,
    classify_grid,
    disk_domain,
    domain_from_spec,
    interior_x_extent,
    jordan_measure_bounds,
    lshape_domain,
    polygon_domain,
    rect_domain,
    slice,
    slice_lengths,
    slice_limit_measure,
)
from .integrate import (
    DarbouxEstimate,
    FubiniReport,
    IntegralReport,
    Status,
    darboux_double,
    default_eps_seq,
    fubini_check,
    inner_improper_integral,
    integrate_double,
    iterated_integral,
    rectangle_fubini,
    upper_lower_partial,
)

__version__ = "0.1.0"
