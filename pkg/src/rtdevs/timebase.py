"""Integer-microsecond time base.

Finite instants and durations are plain ``int`` counts of microseconds.
``INFINITY`` is a singleton that compares greater than every ``int`` and is
the time advance of a passive model.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from functools import total_ordering
from typing import Union

US_PER_S = 1_000_000
MAX_TIME = 2**64 - 1


@total_ordering
class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self or isinstance(other, int):
            return False
        return NotImplemented

    def __hash__(self):
        return hash("rtdevs.INFINITY")

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

Time = Union[int, _Infinity]


def is_finite(t: Time) -> bool:
    return t is not INFINITY


def check_time(t) -> Time:
    """Validate that ``t`` is a legal time value and return it."""
    if t is INFINITY:
        return t
    if isinstance(t, bool) or not isinstance(t, int):
        raise TypeError(f"time must be an int count of microseconds or INFINITY, got {t!r}")
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if t > MAX_TIME:
        raise OverflowError(f"time {t} exceeds the 64-bit microsecond range")
    return t


def time_add(t: Time, d: Time) -> Time:
    """Exact ``t + d``; any infinite operand gives ``INFINITY``.

    Raises ``OverflowError`` when the sum leaves the unsigned 64-bit range,
    which in practice means a model returned an absurd time advance.
    """
    check_time(t)
    check_time(d)
    if t is INFINITY or d is INFINITY:
        return INFINITY
    total = t + d
    if total > MAX_TIME:
        raise OverflowError(f"{t} + {d} overflows the 64-bit microsecond range")
    return total


def seconds(value) -> int:
    """Convert decimal seconds (``str``, ``int``, ``float`` or ``Decimal``) to microseconds.

    The conversion goes through the decimal text so ``seconds(28.5947)`` is
    exactly 28_594_700. Values finer than one microsecond are rejected.
    """
    if isinstance(value, bool):
        raise TypeError("seconds() does not accept booleans")
    try:
        d = Decimal(value if isinstance(value, (str, Decimal)) else repr(value))
    except InvalidOperation:
        raise ValueError(f"not a decimal number of seconds: {value!r}") from None
    if not d.is_finite():
        raise ValueError(f"not a finite number of seconds: {value!r}")
    us = d * US_PER_S
    if us != us.to_integral_value():
        raise ValueError(f"{value!r} s is not a whole number of microseconds")
    return check_time(int(us))


def format_seconds(us: int) -> str:
    """Render microseconds as decimal seconds without trailing zeros."""
    whole, frac = divmod(us, US_PER_S)
    if not frac:
        return str(whole)
    return f"{whole}.{frac:06d}".rstrip("0")
