"""Sound-speed profile inversion from multi-beam echo sounder travel times.

Thin Python layer over the C++ core: EOF bases from historical profiles,
a layered ray tracer for bottom-return travel times, Tikhonov-regularized
Gauss-Newton inversion over a regularization grid, and learned/fallback
selection of the regularization weight.
"""

from ._ssinv import *  # noqa: F401,F403
from ._ssinv import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
