"""UAV air-to-ground channel models and RBF signal-strength prediction."""

from ._skylink import *  # noqa: F401,F403
from ._skylink import __version__  # noqa: F401
