"""Query kernels: a compiled Cython core with a NumPy fallback.

Both backends expose the same five functions over the flattened R-tree
arrays and the sector arena columns:

    point_query, line_query, sinusoid_query, scan_mono, filter_mono

The compiled backend is used by default when the extension built; callers
can force a backend by name ("compiled", "python") or keep "auto".
"""

from . import _pykernels

try:
    from . import _ckernels

    _HAVE_COMPILED = True
except ImportError:
    _ckernels = None
    _HAVE_COMPILED = False


def available() -> tuple[str, ...]:
    return ("compiled", "python") if _HAVE_COMPILED else ("python",)


def get(name: str = "auto"):
    """Resolve a backend module from its name."""
    if name in ("auto", None):
        return _ckernels if _HAVE_COMPILED else _pykernels
    if name == "compiled":
        if not _HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not available in this build")
        return _ckernels
    if name == "python":
        return _pykernels
    raise ValueError(f"unknown kernel backend {name!r}")


def default():
    return get("auto")
