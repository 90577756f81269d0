"""Kernel backend selection.

The hot loops (brute-force matrix enumeration and the Monte Carlo integrand
sum) have two interchangeable implementations: a Cython extension compiled at
install time and a pure-numpy fallback.  The extension is preferred when the
build produced it; both expose exactly the same functions and are compared by
tests/benchmarks.
"""

try:
    from . import _fast as _impl

    BACKEND = "cython"
except ImportError:  # extension not built; numpy fallback
    from . import _slow as _impl

    BACKEND = "python"

from . import _slow

bruteforce_count_range = _impl.bruteforce_count_range
mc_f_sum = _impl.mc_f_sum


def backends():
    """Mapping of available backend name -> module (for parity tests/benchmarks)."""
    out = {"python": _slow}
    if BACKEND == "cython":
        out["cython"] = _impl
    return out
