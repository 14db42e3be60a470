"""Secure RSS localisation by half-space voting over circle intersections."""

from .detector import DetectionReport, detect
from .geometry import InterestPointSet, interest_points
from .model import Anchor, AttackSpec, ChannelParams, MeasurementSet, generate_measurements, make_anchors
from .simharness import RunRecord, ScenarioConfig, run_campaign
from .votesolver import LocalizationResult, localize

__all__ = [
    "Anchor",
    "AttackSpec",
    "ChannelParams",
    "DetectionReport",
    "InterestPointSet",
    "LocalizationResult",
    "MeasurementSet",
    "RunRecord",
    "ScenarioConfig",
    "detect",
    "generate_measurements",
    "interest_points",
    "localize",
    "make_anchors",
    "run_campaign",
]
