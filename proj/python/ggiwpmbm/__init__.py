"""GGIW-PMBM extended-object tracking filter."""

try:
    from ._ggiwpmbm import *  # noqa: F401,F403
except ImportError:  # in-tree builds put the module next to the package
    from _ggiwpmbm import *  # noqa: F401,F403
