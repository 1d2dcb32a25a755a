"""Geometric control toolkit: controllability tests, Lie brackets and
solved optimal-control problems (double integrator, Dubins car, Euler
elastica, Heisenberg sub-Riemannian geodesics)."""

__version__ = "0.1.0"
