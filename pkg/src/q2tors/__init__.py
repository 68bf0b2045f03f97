"""Torsion of elliptic curves over Q(2^inf), the compositum of all quadratic fields."""
from __future__ import annotations

from .ec import Curve, Point, normalize_model, twist_curve
from .mqfield import MQElem, MQTower, make_tower, parse_elem
from .torsion import full_torsion, p_primary, twist_decomposition_check, verify_bounds

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "MQElem",
    "MQTower",
    "Point",
    "full_torsion",
    "make_tower",
    "normalize_model",
    "p_primary",
    "parse_elem",
    "twist_curve",
    "twist_decomposition_check",
    "verify_bounds",
]
