"""Query performance prediction evaluation toolkit."""

try:
    from ._qppeval import *  # noqa: F401,F403
    from ._qppeval import __version__  # noqa: F401
except ImportError:
    # Development layout: the extension sits on sys.path instead of
    # inside the package.
    from _qppeval import *  # noqa: F401,F403
    from _qppeval import __version__  # noqa: F401
