"""Exact simulation of optimal 1->M universal quantum cloning on spin-star networks."""

__version__ = "0.1.0"
