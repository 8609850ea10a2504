"""Sharp sup-norm embedding constants on planar domains.

Thin re-export of the native extension built from the C++ core.
"""

try:
    from ._morreylab import *  # noqa: F401,F403  (installed wheel layout)
    from ._morreylab import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _morreylab import *  # noqa: F401,F403
    from _morreylab import __version__  # noqa: F401
