"""Backend selection for batch query evaluation.

The compiled extension is used when it was built; setting
``HIDDEN_EDGE_KERNEL=python`` forces the numpy fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _kernels_py
from .plan import QueryBatch


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return None
    return _kernels


_COMPILED = _load_compiled()
_BACKENDS = {"python": _kernels_py}
if _COMPILED is not None:
    _BACKENDS["compiled"] = _COMPILED

BACKEND = "compiled" if _COMPILED is not None and os.environ.get("HIDDEN_EDGE_KERNEL") != "python" else "python"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def evaluate_batch(adj: np.ndarray, batch: QueryBatch, backend: str | None = None) -> np.ndarray:
    """Boolean answer per query of ``batch`` against packed adjacency ``adj``."""
    impl = _BACKENDS[backend or BACKEND]
    out = np.zeros(batch.num_queries, dtype=np.uint8)
    if batch.num_queries:
        written = impl.evaluate(
            np.ascontiguousarray(adj, dtype=np.uint64),
            batch.bases,
            batch.base_offsets,
            batch.masks,
            batch.mask_offsets,
            out,
        )
        if written != batch.num_queries:
            raise RuntimeError(f"kernel answered {written} of {batch.num_queries} queries")
    return out.view(bool)
