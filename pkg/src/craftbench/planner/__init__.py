"""Planner backends: deterministic oracle, live HTTP chat, transcript playback."""

from craftbench.planner.base import BackendDescriptor, PlannerBackend
from craftbench.planner.http import EndpointConfig, HttpBackend
from craftbench.planner.oracle import (
    OracleBackend,
    oracle_conventional,
    oracle_predictive,
)
from craftbench.planner.playback import PlaybackBackend

__all__ = [
    "BackendDescriptor",
    "EndpointConfig",
    "HttpBackend",
    "OracleBackend",
    "PlannerBackend",
    "PlaybackBackend",
    "oracle_conventional",
    "oracle_predictive",
]
