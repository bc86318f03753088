"""Episode-loop kernel selection.

The per-period loop dominates a run's cost, so it has a compiled
implementation (Cython, abex._kernel) with a pure-Python twin of identical
semantics.  The compiled kernel is used when it imported successfully and
the environment variable ABEX_PURE is unset; both paths expose the same
run_abe_episode signature and produce the same traces.
"""

import os

from . import _fallback

try:
    from . import _kernel
    _HAVE_COMPILED = True
except ImportError:
    _kernel = None
    _HAVE_COMPILED = False


def compiled_available():
    return _HAVE_COMPILED


def using_compiled():
    return _HAVE_COMPILED and not os.environ.get("ABEX_PURE")


def run_abe_episode(schedule, model, X, draws, checkpoints, keep_state=False,
                    force=None):
    """Advance the adaptive-binning policy through one pre-drawn episode.

    Returns (cum_regret at checkpoints, trained policy or None).  `force`
    overrides the default backend selection with "compiled" or "python".
    """
    backend = force or ("compiled" if using_compiled() else "python")
    if backend == "compiled":
        if not _HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but not built")
        if _kernel.supports_model(model.kind):
            return _kernel.run_abe_episode(schedule, model, X, draws,
                                           checkpoints, keep_state)
    return _fallback.run_abe_episode(schedule, model, X, draws, checkpoints,
                                     keep_state)
