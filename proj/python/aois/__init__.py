"""Probability-of-evidence estimation for Bayesian networks.

Importance sampling with three estimators over one shared sample stream: the
flat sample mean, and the sample means computed on an AND/OR sample tree and
on a context-merged AND/OR sample graph. Exact oracles are included for
desk-scale instances.
"""

try:
    from ._aois import *  # noqa: F401,F403
    from ._aois import __version__  # noqa: F401
except ImportError:  # running against a build tree, module next to the package
    from _aois import *  # noqa: F401,F403
    from _aois import __version__  # noqa: F401
