"""Shared exception types and the global vertex-enumeration capacity limit."""

# Hard cap on the number of summands for any operation that enumerates all
# 2**n sign vectors.  2**24 terms is the largest sum that is still reasonable
# to evaluate on a desktop; beyond that the closed form is the wrong tool.
N_MAX = 24


class CapacityError(ValueError):
    """An operation would exceed a documented size limit (e.g. 2**n terms)."""


class ModeError(ValueError):
    """An evaluation mode cannot represent the given input exactly."""
