"""Kernel backend selection.

The compiled extension is used when it imported cleanly; setting the
environment variable ``TRAJGRAPH_PURE_PYTHON=1`` before import forces the
numpy fallback (useful for debugging and for benchmarking the two
backends against each other).
"""

import os

from . import pure

if os.environ.get("TRAJGRAPH_PURE_PYTHON", "") not in ("", "0"):
    active = pure
else:
    try:
        from . import _speedups as active  # type: ignore[no-redef]
    except ImportError:
        active = pure

try:
    from . import _speedups as compiled
except ImportError:
    compiled = None


def backend_name() -> str:
    return active.BACKEND


def have_compiled() -> bool:
    return compiled is not None
