"""Exact computations on complex supermanifold atlases: splitting, obstructions and Atiyah classes."""

from .atlas import Atlas, TransitionMap, split_model_of, validate_atlas
from .grassmann import ChartSignature, SuperElement
from .sma import parse_atlas, render_atlas

__version__ = "0.1.0"
