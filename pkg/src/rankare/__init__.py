"""Asymptotic relative efficiencies of rank tests, their bounds, and rank
autocorrelations."""

from .densities import Cauchy, Gaussian, HodgesLehmann, LogConcave, PowerExp, StudentT, parse_density
from .efficiency import (
    AreReport,
    are_nonserial,
    are_serial,
    bound_generic,
    bound_symmetric,
    bound_student_scores,
    bound_serial_sww,
    crossing_scan,
    hl_limit,
)
from .functionals import QuadResult, cross_info, cross_moment, integrate_unit
from .scores import CauchyScore, FromDensity, StudentScore, VanDerWaerden, Wilcoxon, parse_score

__version__ = "0.1.0"

__all__ = [
    "AreReport", "Cauchy", "CauchyScore", "FromDensity", "Gaussian", "HodgesLehmann", "LogConcave",
    "PowerExp", "QuadResult", "StudentScore", "StudentT", "VanDerWaerden", "Wilcoxon", "are_nonserial",
    "are_serial", "bound_generic", "bound_symmetric", "bound_student_scores", "bound_serial_sww", "crossing_scan",
    "cross_info", "cross_moment", "hl_limit", "integrate_unit", "parse_density", "parse_score",
]
