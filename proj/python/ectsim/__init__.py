"""Python interface to the capacitance tomography simulator."""

try:
    from ._ectsim import *  # noqa: F401,F403  (wheel layout)
    from ._ectsim import __version__  # noqa: F401
except ImportError:  # in-tree builds put the module on PYTHONPATH instead
    from _ectsim import *  # noqa: F401,F403
    from _ectsim import __version__  # noqa: F401
