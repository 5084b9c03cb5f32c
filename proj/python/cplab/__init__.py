"""Matrix Painleve systems, their KKS reduction to interacting particles,
Weierstrass machinery and the PII Stokes algebra, backed by the C++ core."""

from ._cplab import *  # noqa: F401,F403
from ._cplab import __doc__  # noqa: F401

__version__ = "0.1.0"
