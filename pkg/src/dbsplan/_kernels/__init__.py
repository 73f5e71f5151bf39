"""Hot inner loops, compiled when possible.

The compiled extension ``_ckernels`` is preferred. Set ``DBSPLAN_KERNELS=python``
to force the pure-Python fallback (useful for debugging and benchmarking).
"""
import os

from . import _python

python_backend = _python

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("DBSPLAN_KERNELS", "").lower() != "python":
    backend = compiled_backend
else:
    backend = _python

BACKEND = backend.NAME

hc_select_pair = backend.hc_select_pair
evaluate_population = backend.evaluate_population
crossover_repair = backend.crossover_repair
crossover_batch = backend.crossover_batch

EDGE_POS, NODE_POS, DEFICIT, N_NEG = 0, 1, 2, 3

__all__ = [
    "BACKEND",
    "backend",
    "compiled_backend",
    "python_backend",
    "hc_select_pair",
    "evaluate_population",
    "crossover_repair",
    "crossover_batch",
]
