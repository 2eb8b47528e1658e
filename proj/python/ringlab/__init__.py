"""Synchronous-ring consensus laboratory: Python front-end for the native core."""

try:
    from ._ringlab import *  # noqa: F401,F403  (installed package layout)
    from ._ringlab import __doc__ as _core_doc  # noqa: F401
except ImportError:  # development layout: extension built out-of-tree
    import os
    import sys

    _module_dir = os.environ.get("RINGLAB_MODULE_DIR")
    if _module_dir and _module_dir not in sys.path:
        sys.path.insert(0, _module_dir)
    from _ringlab import *  # noqa: F401,F403

__all__ = [
    "simulate_json",
    "check_fairness",
    "rigger_utility",
    "best_response",
    "monte_carlo",
    "forced_decision",
    "derive_constraints",
    "equilibrium_functions",
    "ConfigError",
    "CapacityError",
]
