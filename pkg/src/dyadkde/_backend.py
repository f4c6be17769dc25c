"""Runtime selection between the compiled extension and the numpy fallback.

The compiled module is preferred when importable; set DYADKDE_BACKEND to
"python" or "compiled" to force a choice (useful for benchmarks/tests).
"""

import os


def load_backend(name: str):
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    if name == "python":
        from . import _pykernels

        return _pykernels
    raise ValueError(f"unknown backend {name!r}; use 'compiled' or 'python'")


def available_backends() -> tuple[str, ...]:
    names = []
    try:
        load_backend("compiled")
        names.append("compiled")
    except ImportError:
        pass
    names.append("python")
    return tuple(names)


_forced = os.environ.get("DYADKDE_BACKEND", "").strip().lower()
if _forced:
    _impl = load_backend(_forced)
else:
    try:
        _impl = load_backend("compiled")
    except ImportError:
        _impl = load_backend("python")

BACKEND = _impl.BACKEND_NAME
kernel_sums_core = _impl.kernel_sums_core
density_grid = _impl.density_grid
el_solve = _impl.el_solve
