"""Harmonic chain nonequilibrium steady states: exact covariances, Monte Carlo,
hydrodynamics and fluctuating hydrodynamics."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
