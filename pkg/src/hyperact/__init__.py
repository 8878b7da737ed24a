"""Computational toolkit for group actions on hyperbolic graphs and Chevalley group identities."""
import os

# the TBB layer shipped with some numba wheels is too old; pick a portable layer before numba loads
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
# allow --workers 4 even on small machines so worker-count independence is actually exercised
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(4, os.cpu_count() or 1)))

__version__ = "0.1.0"
