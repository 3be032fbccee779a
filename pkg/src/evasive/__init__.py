"""Evasive and scattered subspaces over finite fields."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .field import GF, FieldElement, FieldSpec, find_roots, preset, subfield_map  # noqa: E402
from .subspaces import (  # noqa: E402
    AmbientSpace,
    FqnSubspace,
    FqSubspace,
    ambient,
    load_subspace,
    save_subspace,
)
from .evasive_check import EvasivenessCertificate, is_evasive, profile, q_system_params  # noqa: E402
from .duality import delsarte_dual, ordinary_dual  # noqa: E402
from .bounds import best_bounds, case_table  # noqa: E402

__all__ = [
    "GF", "FieldElement", "FieldSpec", "find_roots", "preset", "subfield_map",
    "AmbientSpace", "FqnSubspace", "FqSubspace", "ambient", "load_subspace", "save_subspace",
    "EvasivenessCertificate", "is_evasive", "profile", "q_system_params",
    "delsarte_dual", "ordinary_dual", "best_bounds", "case_table",
]
