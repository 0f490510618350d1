"""Quotients of free groups along the lower central and derived series."""

from .fox import Laurent, MetabelianImage, metabelian_image
from .magnus import (
    LCSDepth,
    TruncatedSeries,
    basic_commutators,
    lcs_depth,
    lcs_layer_ranks,
    magnus_image,
    necklace_count,
    nilpotent_surjectivity,
)
from .stallings import SubgroupGraph, subgroup_membership, subgroup_rank

__all__ = [
    "LCSDepth",
    "Laurent",
    "MetabelianImage",
    "SubgroupGraph",
    "TruncatedSeries",
    "basic_commutators",
    "lcs_depth",
    "lcs_layer_ranks",
    "magnus_image",
    "metabelian_image",
    "necklace_count",
    "nilpotent_surjectivity",
    "subgroup_membership",
    "subgroup_rank",
]
