"""Decoding thresholds by bisection on the erasure probability."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..channel import QpecParams
from ..errors import ValidationError
from ..gf import make_field
from ..ldpc import DegreeDistribution
from .cardinality import cardinality_de_run
from .exact import exact_de_run
from .pm_models import model_name

log = logging.getLogger(__name__)

CONVERGED_P_E = 1e-9
MAX_ITERATIONS = 2000


@dataclass(frozen=True)
class ThresholdResult:
    """Bisection bracket: DE converges at ``lo`` and fails at ``hi``."""
    lo: float
    hi: float

    @property
    def value(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __float__(self):
        return self.value


def converges(dd: DegreeDistribution, q: int, M: int, eps: float, model: str,
              max_l: int = MAX_ITERATIONS, p_target: float = CONVERGED_P_E) -> bool:
    """True when p_e drops below ``p_target`` within ``max_l`` iterations."""
    params = QpecParams(make_field(q), M, eps)
    if model == "exact-de":
        trace = exact_de_run(dd, params, max_l, p_target)
    else:
        trace = cardinality_de_run(dd, params, model, max_l, p_target)
    return trace.p_e[-1] < p_target


def threshold(dd: DegreeDistribution, q: int, M: int, model: str = "union", tol: float = 1e-4,
              max_l: int = MAX_ITERATIONS, p_target: float = CONVERGED_P_E,
              lo: float = 0.0, hi: float = 1.0) -> ThresholdResult:
    """Largest eps for which DE drives p_e to zero, bracketed to width ``tol``.

    ``model`` is a P_m model name for the cardinality recursion, or
    ``"exact-de"`` for the exact subset recursion (small q only).
    """
    if tol < 1e-5:
        raise ValidationError("tol must be at least 1e-5")
    if model != "exact-de":
        model = model_name(model)
    if not converges(dd, q, M, lo, model, max_l, p_target):
        return ThresholdResult(lo, lo)
    if converges(dd, q, M, hi, model, max_l, p_target):
        return ThresholdResult(hi, hi)
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if converges(dd, q, M, mid, model, max_l, p_target):
            lo = mid
        else:
            hi = mid
    log.info("threshold q=%d M=%d model=%s: [%.6f, %.6f]", q, M, model, lo, hi)
    return ThresholdResult(lo, hi)
