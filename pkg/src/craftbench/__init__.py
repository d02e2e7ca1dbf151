"""Deterministic crafting-world simulator and agent-curriculum benchmark."""

__version__ = "0.1.0"
