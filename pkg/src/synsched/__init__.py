"""Synthesis and evaluation of syndrome-measurement schedules for stabilizer codes."""

__version__ = "0.1.0"
