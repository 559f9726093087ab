"""Primal-dual first-order convex optimization by smoothing and restarting."""

from . import harness, linops, problems, proxcore, smoothing, solvers  # noqa: F401
from .linops import LinearMap  # noqa: F401

__version__ = "0.1.0"
