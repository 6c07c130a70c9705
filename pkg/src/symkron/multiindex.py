"""Multi-indices of fixed modulus: enumerations, ranking and counting.

Two enumerations of ``{k in N^d : |k| = n}`` are used throughout:

* the *lexicographic* one ``lex_enumerate(d, n)``, duplicate free, of length
  ``L_n = binom(n + d - 1, n)``, starting at ``(n, 0, ..., 0)``;
* the *redundant* one, of length ``d**n``, where entry ``j`` is the sum of the
  unit vectors picked out by the base-``d`` digits of ``j - 1``.

The lexicographic order is the order in which distinct multi-indices first
occur in the redundant enumeration, which coincides with descending
lexicographic order of the tuples.  All user facing indices are 1-based.
"""

import itertools
import math
from functools import lru_cache

import numpy as np

from .errors import ShapeError, SizeCapError
from .limits import INT64_MAX, check_full

__all__ = [
    "level_size",
    "lex_enumerate",
    "lex_array",
    "lex_rank",
    "lex_ranks",
    "redundant_entry",
    "redundant_enumerate",
    "redundant_labels",
    "multinomial",
    "sigma_cardinality",
    "sigma_set",
    "first_index",
    "sqrt_factorial",
    "sqrt_factorials",
    "log_sqrt_factorials",
]


def _check_dn(d, n):
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    if int(n) != n or n < 0:
        raise ValueError(f"order must be a non-negative integer, got {n!r}")


def level_size(d, n):
    """Number of multi-indices in ``N^d`` of modulus ``n``.

    Raises :class:`SizeCapError` if the count does not fit in a signed 64-bit
    integer.
    """
    _check_dn(d, n)
    size = math.comb(n + d - 1, n)
    if size > INT64_MAX:
        raise SizeCapError(f"L_n = binom({n + d - 1}, {n}) overflows 64 bits")
    return size


def _compositions(d, n):
    # descending lexicographic order
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(d - 1, n - first):
            yield (first,) + rest


@lru_cache(maxsize=256)
def lex_enumerate(d, n):
    """All multi-indices of modulus ``n`` in ``d`` dimensions, in canonical order.

    >>> lex_enumerate(2, 3)
    ((3, 0), (2, 1), (1, 2), (0, 3))
    """
    level_size(d, n)
    return tuple(_compositions(d, n))


@lru_cache(maxsize=256)
def lex_array(d, n):
    """``lex_enumerate(d, n)`` as a read-only ``(L_n, d)`` integer array."""
    arr = np.array(lex_enumerate(d, n), dtype=np.int64).reshape(-1, d)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=64)
def _binomial_table(rows, cols):
    table = np.zeros((rows + 1, cols + 1), dtype=np.int64)
    for m in range(rows + 1):
        for c in range(min(m, cols) + 1):
            table[m, c] = math.comb(m, c)
    table.setflags(write=False)
    return table


def lex_ranks(alphas):
    """0-based canonical ranks of the rows of an ``(N, d)`` array.

    Each row is ranked among the multi-indices of its own modulus.  Uses the
    closed-form count of tuples preceding a given one, so nothing of size
    ``L_n`` is built.
    """
    alphas = np.asarray(alphas, dtype=np.int64)
    if alphas.ndim != 2:
        raise ShapeError("expected a two-dimensional array of multi-indices")
    count, d = alphas.shape
    ranks = np.zeros(count, dtype=np.int64)
    if count == 0 or d == 1:
        return ranks
    remaining = alphas.sum(axis=1)
    table = _binomial_table(int(remaining.max()) + d, d)
    for i in range(d - 1):
        cols = d - i - 1
        k_i = alphas[:, i]
        gap = remaining - k_i
        mask = gap > 0
        # tuples sharing the prefix but with a larger i-th entry
        ranks[mask] += table[gap[mask] - 1 + cols, cols]
        remaining = remaining - k_i
    return ranks


def lex_rank(d, n, k):
    """1-based position of ``k`` in ``lex_enumerate(d, n)``."""
    _check_dn(d, n)
    k = tuple(int(v) for v in k)
    if len(k) != d:
        raise ShapeError(f"multi-index {k} does not have length {d}")
    if any(v < 0 for v in k):
        raise ValueError(f"multi-index {k} has a negative entry")
    if sum(k) != n:
        raise ValueError(f"multi-index {k} has modulus {sum(k)}, expected {n}")
    return int(lex_ranks(np.array([k]))[0]) + 1


def redundant_entry(d, n, j):
    """Entry ``j`` (1-based) of the redundant enumeration.

    Digit ``m`` of ``j - 1`` in base ``d`` contributes the unit vector
    ``e_{m+1}``; the most significant digit is the one appended last by the
    recursive construction.  Only the digit counts matter for the result.
    """
    _check_dn(d, n)
    if not 1 <= j <= d**n:
        raise IndexError(f"index {j} outside 1..{d**n}")
    k = [0] * d
    rest = j - 1
    for _ in range(n):
        rest, digit = divmod(rest, d)
        k[digit] += 1
    return tuple(k)


def redundant_enumerate(d, n):
    """Iterate over the ``d**n`` entries of the redundant enumeration."""
    _check_dn(d, n)
    for digits in itertools.product(range(d), repeat=n):
        k = [0] * d
        for digit in digits:
            k[digit] += 1
        yield tuple(k)


@lru_cache(maxsize=64)
def redundant_labels(d, n):
    """0-based canonical label of every entry of the redundant enumeration.

    Built by the block recursion: the order ``n + 1`` list is the row-wise
    vectorisation of the ``d x d**n`` table whose row ``m`` is the order ``n``
    list shifted by ``e_m``.  Requires ``d**n`` under the full-vector cap.
    """
    _check_dn(d, n)
    check_full(d, n, "redundant enumeration")
    entries = np.zeros((1, d), dtype=np.int64)
    eye = np.eye(d, dtype=np.int64)
    for _ in range(n):
        entries = (eye[:, None, :] + entries[None, :, :]).reshape(-1, d)
    labels = lex_ranks(entries)
    labels.setflags(write=False)
    return labels


def multinomial(n, k):
    """``n! / (k_1! ... k_d!)``; zero if any argument is negative or ``|k| != n``."""
    k = [int(v) for v in k]
    if n < 0 or any(v < 0 for v in k) or sum(k) != n:
        return 0
    result = math.factorial(n)
    for v in k:
        result //= math.factorial(v)
    return result


def _check_label(d, n, i):
    size = level_size(d, n)
    if not 1 <= i <= size:
        raise IndexError(f"label {i} outside 1..{size}")


def sigma_cardinality(d, n, i):
    """Number of positions of the redundant enumeration carrying ``ℓ_n(i)``."""
    _check_label(d, n, i)
    return multinomial(n, lex_enumerate(d, n)[i - 1])


def sigma_set(d, n, i):
    """The 1-based positions ``j`` with ``ν_n(j) = ℓ_n(i)``, sorted."""
    _check_label(d, n, i)
    check_full(d, n, "sigma set")
    k = lex_enumerate(d, n)[i - 1]
    digits = [m for m in range(d) for _ in range(k[m])]
    positions = set()
    # distinct digit strings of the multiset; place-value weight d**t
    for perm in _distinct_permutations(digits):
        positions.add(1 + sum(digit * d**t for t, digit in enumerate(perm)))
    return sorted(positions)


def _distinct_permutations(items):
    items = sorted(items)
    if not items:
        yield ()
        return
    seen = set()
    for idx, head in enumerate(items):
        if head in seen:
            continue
        seen.add(head)
        for tail in _distinct_permutations(items[:idx] + items[idx + 1:]):
            yield (head,) + tail


def first_index(d, n, i):
    """Smallest 1-based ``j`` with ``ν_n(j) = ℓ_n(i)``, computed positionally."""
    _check_label(d, n, i)
    k = lex_enumerate(d, n)[i - 1]
    # digits sorted ascending from the most significant place
    digits = [m for m in range(d) for _ in range(k[m])]
    j = 0
    for digit in digits:
        j = j * d + digit
    return j + 1


_EXACT_FACTORIAL_LIMIT = 20


def sqrt_factorial(k):
    """``sqrt(k_1! ... k_d!)`` for a multi-index ``k``.

    Exact integer factorials up to modulus 20, ``lgamma`` sums beyond.
    """
    k = [int(v) for v in k]
    if sum(k) <= _EXACT_FACTORIAL_LIMIT:
        prod = 1
        for v in k:
            prod *= math.factorial(v)
        return math.sqrt(prod)
    return math.exp(0.5 * sum(math.lgamma(v + 1) for v in k))


@lru_cache(maxsize=64)
def sqrt_factorials(d, n):
    """``sqrt(ℓ_n(i)!)`` for all labels, as a read-only float array."""
    values = np.array([sqrt_factorial(k) for k in lex_enumerate(d, n)])
    values.setflags(write=False)
    return values


@lru_cache(maxsize=64)
def log_sqrt_factorials(d, n):
    """``log sqrt(ℓ_n(i)!)`` for all labels, via ``lgamma``."""
    values = np.array(
        [0.5 * sum(math.lgamma(v + 1) for v in k) for k in lex_enumerate(d, n)]
    )
    values.setflags(write=False)
    return values
