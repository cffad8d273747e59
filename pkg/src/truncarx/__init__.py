"""truncarx: carry-truncated addition and its use against ARX designs.

Modules:
  words       fixed-width words, carry arrays, the truncated adders
  agreement   exact dyadic agreement probabilities pi(m, N)
  anf         Boolean polynomials in algebraic normal form over GF(2)
  circuit     ARX register machine: concrete + symbolic interpreters
  threefish   Threefish-256 / Skein compression with pluggable addition
  sensitivity Monte Carlo match rates and the sensitivity metric
  solver      brute-force satisfiability for small ANF systems
  cli         `truncarx` command-line entry point

The hot kernels (adders, pair enumeration, the Monte Carlo loop) run
from a compiled extension when built, with a NumPy fallback selected
automatically at import (`truncarx.kernel_backend()` reports which).
"""

from . import _kernels

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active kernel backend: "cython" or "python"."""
    return _kernels.name
