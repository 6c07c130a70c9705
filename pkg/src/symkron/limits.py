"""Size caps for objects of dimension d**n.

The compressed path never needs these; they only guard the dense oracle and
the explicit full-vector representations.
"""

import os

from .errors import SizeCapError

#: default cap on d**n for full vectors and the mode-product oracle
DEFAULT_MAX_FULL = 2**20
#: hard upper bound for the ``SYMKRON_MAX_FULL`` override
MAX_FULL_CEILING = 2**24
#: cap on d**n for explicitly built d**n x d**n Kronecker matrices
MAX_EXPLICIT = 2**12

INT64_MAX = 2**63 - 1


def max_full():
    raw = os.environ.get("SYMKRON_MAX_FULL")
    if not raw:
        return DEFAULT_MAX_FULL
    try:
        value = int(raw)
    except ValueError:
        raise SizeCapError(f"SYMKRON_MAX_FULL must be an integer, got {raw!r}")
    if value < 1:
        raise SizeCapError("SYMKRON_MAX_FULL must be positive")
    return min(value, MAX_FULL_CEILING)


def full_size(d, n):
    return d**n


def check_full(d, n, what="full vector"):
    size = d**n
    cap = max_full()
    if size > cap:
        raise SizeCapError(f"{what}: d**n = {d}**{n} = {size} exceeds cap {cap}")
    return size


def check_explicit(d, n, what="explicit Kronecker matrix"):
    size = d**n
    if size > MAX_EXPLICIT:
        raise SizeCapError(
            f"{what}: d**n = {d}**{n} = {size} exceeds explicit-build cap {MAX_EXPLICIT}"
        )
    return size
