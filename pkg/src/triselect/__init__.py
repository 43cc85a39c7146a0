"""Exact, certified selection of a point lying in many spanned triangles."""
from .certificate import verify_certificate
from .generators import GeneratorSpec, generate
from .geometry import Point2, PointSet, Triangle
from .intervals import Interval1, IntervalMultiset, max_stabbing, weighted_select
from .oracle import exact_max_depth, heuristic_baseline
from .selection import SelectionCertificate, run_selection

__all__ = [
    "Point2", "PointSet", "Triangle", "Interval1", "IntervalMultiset", "max_stabbing",
    "weighted_select", "exact_max_depth", "heuristic_baseline", "SelectionCertificate",
    "run_selection", "GeneratorSpec", "generate", "verify_certificate",
]
