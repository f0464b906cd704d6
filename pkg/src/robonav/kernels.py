"""Pixel kernels, compiled when the Cython extension is built, pure Python otherwise.

``BACKEND`` names the implementation picked at import; ``use_backend`` switches
it explicitly (benchmarks and equivalence tests use this).
"""
from __future__ import annotations

from robonav import _pykernels

try:
    from robonav import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_impl = _ckernels if _ckernels is not None else _pykernels
BACKEND = "cython" if _ckernels is not None else "python"


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def use_backend(name: str) -> None:
    global _impl, BACKEND
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        _impl = _ckernels
    elif name == "python":
        _impl = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def get_backend(name: str):
    return {"python": _pykernels, "cython": _ckernels}[name]


def classify_image(pixels, margin: int, min_value: int):
    return _impl.classify_image(pixels, margin, min_value)


def component_stats(labels):
    return _impl.component_stats(labels)
