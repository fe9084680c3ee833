"""Simulator for QSVT-based quantum principal component analysis."""

__version__ = "0.1.0"

from .blockenc import BlockEncoding, ResourceLedger
from .errors import GapTooSmall, QPCAError
from .linalg import Spectrum, eigh
from .power import DensitySource, qpca_components, qpca_top
from .qsvt import block_encode_density

__all__ = [
    "BlockEncoding",
    "DensitySource",
    "GapTooSmall",
    "QPCAError",
    "ResourceLedger",
    "Spectrum",
    "__version__",
    "block_encode_density",
    "eigh",
    "qpca_components",
    "qpca_top",
]
