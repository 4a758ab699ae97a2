"""Cooperative multi-target positioning for cell-free massive MIMO.

Thin python surface over the C++ core: scenario synthesis, RSS/angular
feature extraction, similarity scoring, fingerprint baselines and the joint
positioning + correction training loop.
"""

from ._cfpos import *  # noqa: F401,F403
from ._cfpos import __version__  # noqa: F401
