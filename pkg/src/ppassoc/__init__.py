"""Exact likelihood-ratio tests for triggering and correlation between point processes."""

from .diagnostics import KsConfig, ecdf_table, fisher_combine, restricted_statistic, weighted_ks_plus
from .exactp import boundary_crossing_probability, ordered_uniform_survival, p_value, solve_thresholds
from .glrt import GlrOutcome, log_ell, maximize, run_test
from .measure import (
    IntervalUnion,
    NullIntensity,
    ObservationWindow,
    TransformedSample,
    build_intensity,
    correlation_set,
    rho,
    transform,
    triggered_set,
    uniform_intensity,
)
from .multiplicity import ScreenResult, bh_reject, screen, triggering_report

__version__ = "0.1.0"
