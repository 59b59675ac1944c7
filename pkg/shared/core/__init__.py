"""
Forested Links Core Package
Contains configuration, errors, document models, utilities and ring arithmetic.
"""

from .config import Config
from .errors import *
from .rings import RingElement, RingHandle, RingKind

__version__ = "0.1.0"
__all__ = ["Config", "RingElement", "RingHandle", "RingKind"]
