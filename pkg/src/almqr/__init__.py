"""almqr: unordered-tuple spaces, multi-valued inverses of branched covers,
invariant differential forms, and numerical quasiconformality verifiers."""

__version__ = "0.1.0"

from .almgren import AlmgrenPoint, DistanceResult, distance, distance_bruteforce
from .kernels import BACKEND as kernel_backend

__all__ = [
    "AlmgrenPoint",
    "DistanceResult",
    "distance",
    "distance_bruteforce",
    "kernel_backend",
    "__version__",
]
