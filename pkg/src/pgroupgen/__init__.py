"""Classification of p-groups of order up to p^5 (p > 3) by p-group generation."""

from .classify import Catalog, classify, expected_count, verify
from .pcover import CoverData, build_cover, is_extendable
from .pcpres import PcPresentation, build, collect, elementary_abelian, is_consistent, quotient

__all__ = [
    "Catalog",
    "CoverData",
    "PcPresentation",
    "build",
    "build_cover",
    "classify",
    "collect",
    "elementary_abelian",
    "expected_count",
    "is_consistent",
    "is_extendable",
    "quotient",
    "verify",
]
