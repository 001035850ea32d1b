# processing/fitting.py
"""
Growth-exponent fitting and verification of fitted slopes against the
closed-form bounds.
"""

import logging
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from core.bound_calculator import AggregateBounds, IndexQuery, aggregate_bounds
from utils.exceptions import DataError

logger = logging.getLogger(__name__)

MIN_POINTS = 3


class Verdict(str, Enum):
    CONSISTENT = 'consistent'
    LOWER_VIOLATED = 'lower_violated'
    UPPER_VIOLATED = 'upper_violated'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual_rms: float
    n_used: int

    def to_dict(self):
        return {
            'slope': self.slope,
            'intercept': self.intercept,
            'residual_rms': self.residual_rms,
            'n_used': self.n_used,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(float(data['slope']), float(data['intercept']),
                   float(data['residual_rms']), int(data['n_used']))


@dataclass(frozen=True)
class VerificationReport:
    fitted: ExponentFit
    theoretical: AggregateBounds
    verdict: Verdict
    tolerance: float
    message: str = ''

    def to_dict(self):
        return {
            'fitted': self.fitted.to_dict(),
            'theoretical': self.theoretical.to_dict(),
            'verdict': self.verdict.value,
            'tolerance': self.tolerance,
            'message': self.message,
        }


def fit_points(ns: Sequence[float], ratios: Sequence[float]) -> ExponentFit:
    """Least squares line through (ln n, ln ratio)."""
    ns = np.asarray(ns, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    if ns.shape != ratios.shape:
        raise DataError("Dimensions and ratios differ in length", field='ratio')
    if ns.size < MIN_POINTS:
        raise DataError(f"A fit needs at least {MIN_POINTS} points, got {ns.size}", field='n')
    if np.any(ns <= 0):
        raise DataError("Dimensions must be positive", field='n')
    if not np.all(np.isfinite(ratios)) or np.any(ratios <= 0):
        raise DataError("Ratios must be finite and positive", field='ratio')

    x = np.log(ns)
    y = np.log(ratios)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    residual_rms = float(np.sqrt(np.mean(residuals ** 2)))
    return ExponentFit(float(slope), float(intercept), residual_rms, int(ns.size))


def fit_exponent(series) -> ExponentFit:
    """Fit of a RatioSeries (anything with ``ns`` and ``ratios``)."""
    return fit_points(series.ns, series.ratios)


def median_fit(fits: List[ExponentFit]) -> ExponentFit:
    """Per-seed fits collapsed to their median slope and intercept."""
    if not fits:
        raise DataError("No fits to summarize", field='fits')
    return ExponentFit(
        float(statistics.median(f.slope for f in fits)),
        float(statistics.median(f.intercept for f in fits)),
        max(f.residual_rms for f in fits),
        min(f.n_used for f in fits),
    )


def verify_against_bounds(fit: ExponentFit, query: IndexQuery, tolerance: float, extremal: bool = False,
                          bounds: Optional[AggregateBounds] = None) -> VerificationReport:
    """
    A witness slope never exceeds the index, so it must stay below the best
    upper bound. When the witness is known to be extremal it must also reach
    the exact value.
    """
    bounds = bounds if bounds is not None else aggregate_bounds(query)
    if bounds.is_empty:
        return VerificationReport(fit, bounds, Verdict.INCONCLUSIVE, tolerance, "no bounds available")

    checked = False
    if bounds.upper is not None:
        checked = True
        if fit.slope > bounds.upper.value + tolerance:
            message = f"slope {fit.slope:.6g} exceeds upper bound {bounds.upper.value:.6g} ({bounds.upper.region})"
            logger.warning(message)
            return VerificationReport(fit, bounds, Verdict.UPPER_VIOLATED, tolerance, message)

    if extremal and bounds.exact is not None:
        checked = True
        if fit.slope < bounds.exact.value - tolerance:
            message = f"slope {fit.slope:.6g} falls short of exact value {bounds.exact.value:.6g}"
            logger.warning(message)
            return VerificationReport(fit, bounds, Verdict.LOWER_VIOLATED, tolerance, message)

    if not checked:
        return VerificationReport(fit, bounds, Verdict.INCONCLUSIVE, tolerance, "no bound applies to the slope")
    return VerificationReport(fit, bounds, Verdict.CONSISTENT, tolerance)

