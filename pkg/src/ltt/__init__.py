"""Deciding local testability of regular tree languages."""

__version__ = "0.1.0"
