"""Partitioning and load-balancing laboratory for particle simulations."""
from lb_lab.config import APP_VERSION

__version__ = APP_VERSION
