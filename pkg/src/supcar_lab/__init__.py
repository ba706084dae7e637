"""Simulation and exact analytics for superpositions of CAR(1) random fields."""

__version__ = "0.1.0"
