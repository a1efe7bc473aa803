"""Gate-model quantum simulator: state vectors, density matrices, noise
channels, error correction, and variational algorithm drivers."""

from qcsim._core import *  # noqa: F401,F403
from qcsim._core import __version__  # noqa: F401
