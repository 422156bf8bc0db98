"""Backend selection for the enumeration kernels.

The compiled ``_speedups`` extension is used when it was built; otherwise the
pure-Python module with identical semantics is used.  Setting the environment
variable ``HYBRIX_PURE_PYTHON=1`` forces the fallback.
"""

import os

from hybrix._purekernels import (  # noqa: F401  (opcodes are shared)
    OP_AND,
    OP_BOT,
    OP_CONST,
    OP_DIA,
    OP_EXISTS,
    OP_NEG,
    OP_SAT,
    OP_SATT,
    OP_VAR,
)

_impl = None
if os.environ.get("HYBRIX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from hybrix import _speedups as _impl
    except ImportError:
        _impl = None
if _impl is None:
    from hybrix import _purekernels as _impl

BACKEND: str = _impl.BACKEND
diamond_table = _impl.diamond_table
evaluate = _impl.evaluate
find_falsifier = _impl.find_falsifier
