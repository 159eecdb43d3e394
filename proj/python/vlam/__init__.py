"""Quantitative equational reasoning for the linear lambda calculus."""

import math
from fractions import Fraction

from ._vlam import *  # noqa: F401,F403
from ._vlam import __doc__  # noqa: F401


def to_number(value):
    """A quantale value as a Fraction, or math.inf for the infinite element."""
    return math.inf if value.is_infinite() else Fraction(str(value))
