"""Actor-critic multipath scheduling with packet replication."""

from padme.wrr import SCHEDULING_CLASSES, SchedulingClass, get_class

__version__ = "0.1.0"

__all__ = ["SCHEDULING_CLASSES", "SchedulingClass", "get_class", "__version__"]
