"""Completely antisymmetric finite-difference stencils.

Thin re-export of the compiled module so both the installed package and an
in-tree build (extension on PYTHONPATH) import the same way.
"""

try:
    from ._skewfd import *  # noqa: F401,F403
    from ._skewfd import __doc__  # noqa: F401
except ImportError:
    from _skewfd import *  # noqa: F401,F403
    from _skewfd import __doc__  # noqa: F401
