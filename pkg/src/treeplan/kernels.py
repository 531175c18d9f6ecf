"""Backend selection for the task kernel (applicability and delete-relaxation).

The compiled extension is used when it was built; otherwise the pure-Python
implementation takes over with identical results.
"""
from . import _relaxed_py

try:
    from . import _relaxed_c
except ImportError:  # extension not built
    _relaxed_c = None

BACKENDS = {"python": _relaxed_py.TaskKernel}
if _relaxed_c is not None:
    BACKENDS["cython"] = _relaxed_c.TaskKernel

BACKEND = "cython" if "cython" in BACKENDS else "python"
TaskKernel = BACKENDS[BACKEND]


def kernel_class(backend: str | None = None):
    if backend is None:
        return TaskKernel
    try:
        return BACKENDS[backend]
    except KeyError:
        raise ValueError(f"kernel backend {backend!r} unavailable; have {sorted(BACKENDS)}") from None


def kernel_for(task, backend: str | None = None):
    """Kernel built from ``task``'s operators and goal."""
    cls = kernel_class(backend)
    return cls(
        task.num_facts,
        [sorted(op.pre) for op in task.operators],
        [sorted(op.add) for op in task.operators],
        sorted(task.goal),
    )
