"""Circle packings of polygonal domains with three- and four-sided gaps."""
from .api import (connect_holes, pack, protect_vertices, repair_bad_gaps, replace_boundary_tangent,
                  simplify_gap, simplify_region)
from .gaps import classify_gap, gap_circumcircle, split_bad_gap
from .model import (BoundaryContact, CocircularityViolation, ContactKind, Degenerate, Gap,
                    GapKind, GapSide, Mode, Overflow, PackOptions, Packing, PackingError,
                    Provenance)

__all__ = [
    "BoundaryContact", "CocircularityViolation", "ContactKind", "Degenerate", "Gap", "GapKind",
    "GapSide", "Mode", "Overflow", "PackOptions", "Packing", "PackingError", "Provenance",
    "classify_gap", "connect_holes", "gap_circumcircle", "pack", "protect_vertices",
    "repair_bad_gaps", "replace_boundary_tangent", "simplify_gap", "simplify_region",
    "split_bad_gap",
]
