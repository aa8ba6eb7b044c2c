"""Evolved immune-network behaviours for differential-drive robots."""

__version__ = "0.1.0"
