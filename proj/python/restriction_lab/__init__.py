"""Numerical laboratory for restriction estimates and dispersive propagators.

The compiled core carries the grids, transforms, surface restriction and
extension operators, the chain verifiers with their sweeps, the propagators,
the counterexample families, and the experiment runner.
"""

try:
    from ._core import *  # noqa: F401,F403  (wheel layout)
    from ._core import __doc__ as _core_doc  # noqa: F401
except ImportError:  # build-tree layout: _core.so next to this package on sys.path
    from _core import *  # noqa: F401,F403

__version__ = "1.0.0"
