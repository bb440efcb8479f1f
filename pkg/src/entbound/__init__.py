"""Entanglement bounds (REEP, its regularisation, Rains bound) on OO-invariant states."""
from .config import Config, get_config, set_config, using
from .oo import OOState, Region, classify, embed, key_points, twirl
from .measures import MeasureResult, additivity_check, negativity_closed, reep, relent_closed
from .rains import rains_closed, rains_numeric
from .areep import areep

__version__ = "0.1.0"
