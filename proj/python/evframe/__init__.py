"""Event-camera stream slicing, event-frame accumulation and synthetic events."""

from ._evframe import *  # noqa: F401,F403
from ._evframe import EvframeError, __doc__  # noqa: F401

__version__ = "0.1.0"
