"""Tick kernel selector: compiled extension when built, pure Python otherwise.

Set AUXSIM_PURE=1 to force the fallback regardless of what is installed.
Both twins produce bit-identical trajectories; the compiled one just gets
through idle stretches faster.
"""

from __future__ import annotations

import os

if os.environ.get("AUXSIM_PURE") == "1":
    from . import _kernel_py as _impl
else:
    try:
        from . import _kernel_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _impl

IMPL: str = _impl.IMPL
tick = _impl.tick
run_idle = _impl.run_idle

EV_LOCK_ENGAGED = 1
EV_LOCK_RELEASED = 2
EV_SETTLED_NEUTRAL = 4
