"""Majority-logic synthesis and QCA layout/simulation toolkit."""

__version__ = "0.1.0"
