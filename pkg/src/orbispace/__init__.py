"""Exact decision procedures for manifold orbit spaces of compact linear groups."""

from .errors import (
    CapExceeded,
    InternalContradiction,
    InvalidInput,
    OrbispaceError,
)
from .reducer import ReductionTrace, reduce_to_2stable
from .repmodel import MonomialElement, RepSpec, component_group, validate
from .serialize import spec_from_json, spec_to_json
from .verdict import Verdict, analyze
from .weightset import WeightMultiset, is_q_stable

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "InternalContradiction",
    "InvalidInput",
    "MonomialElement",
    "OrbispaceError",
    "ReductionTrace",
    "RepSpec",
    "Verdict",
    "WeightMultiset",
    "analyze",
    "component_group",
    "is_q_stable",
    "reduce_to_2stable",
    "spec_from_json",
    "spec_to_json",
    "validate",
]
