"""Exact singularity of integer matrices by Gaussian elimination over prime fields.

Rank modulo a prime never exceeds the rank over the rationals, so full rank
modulo any prime proves invertibility. A deficient rank modulo a prime only
means the prime may divide the determinant; those matrices are re-checked
modulo two random primes in (2^61, 2^62) and declared singular only when both
agree. Primes below 2^62 run through a compiled Montgomery kernel; larger
primes fall back to exact Python integers.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

import numpy as np
from numba import njit
from sympy import isprime, nextprime

from ..errors import ParameterError
from ..sampling.base import CombMatrix

FAST_PRIME = 2_147_483_647
LARGE_PRIME_LOW = 2**61
LARGE_PRIME_HIGH = 2**62
MONTGOMERY_LIMIT = 2**62


@njit(cache=True, nogil=True)
def _rank_mod_small_prime(matrix: np.ndarray, p: int) -> int:
    # entries stay below 2**31, so every product fits in int64
    a = matrix.copy()
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        pivot = -1
        for i in range(rank, rows):
            if a[i, col] != 0:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for j in range(cols):
                tmp = a[rank, j]
                a[rank, j] = a[pivot, j]
                a[pivot, j] = tmp
        inv = 1
        base = a[rank, col]
        exponent = p - 2
        while exponent > 0:
            if exponent & 1:
                inv = (inv * base) % p
            base = (base * base) % p
            exponent >>= 1
        for j in range(cols):
            a[rank, j] = (a[rank, j] * inv) % p
        for i in range(rank + 1, rows):
            factor = a[i, col]
            if factor != 0:
                for j in range(col, cols):
                    a[i, j] = (a[i, j] - factor * a[rank, j]) % p
        rank += 1
        if rank == rows:
            break
    return rank


_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_ZERO = np.uint64(0)
_ONE = np.uint64(1)


@njit(cache=True, nogil=True)
def _mulhi(a: np.uint64, b: np.uint64) -> np.uint64:
    # high word of the 128-bit product, assembled from 32-bit limbs
    a_lo = a & _MASK32
    a_hi = a >> _SHIFT32
    b_lo = b & _MASK32
    b_hi = b >> _SHIFT32
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    cross = (lo_lo >> _SHIFT32) + (hi_lo & _MASK32) + a_lo * b_hi
    return a_hi * b_hi + (hi_lo >> _SHIFT32) + (cross >> _SHIFT32)


@njit(cache=True, nogil=True)
def _mont_mul(a: np.uint64, b: np.uint64, p: np.uint64, neg_inv: np.uint64):
    """a b / 2^64 mod p for a, b < p < 2^62; ``neg_inv`` is -1/p mod 2^64."""
    low = a * b
    m = low * neg_inv
    carry = _ONE if low != _ZERO else _ZERO
    value = _mulhi(a, b) + _mulhi(m, p) + carry
    if value >= p:
        value -= p
    return value


@njit(cache=True, nogil=True)
def _rank_mod_large_prime(
    matrix: np.ndarray, p: np.uint64, neg_inv: np.uint64, r_squared: np.uint64
) -> int:
    # entries are kept in Montgomery form; rows are combined fraction-free
    a = matrix.copy()
    rows, cols = a.shape
    for i in range(rows):
        for j in range(cols):
            a[i, j] = _mont_mul(a[i, j], r_squared, p, neg_inv)
    rank = 0
    for col in range(cols):
        pivot = -1
        for i in range(rank, rows):
            if a[i, col] != _ZERO:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rank:
            for j in range(cols):
                tmp = a[rank, j]
                a[rank, j] = a[pivot, j]
                a[pivot, j] = tmp
        lead = a[rank, col]
        for i in range(rank + 1, rows):
            factor = a[i, col]
            if factor != _ZERO:
                for j in range(col, cols):
                    x = _mont_mul(lead, a[i, j], p, neg_inv)
                    y = _mont_mul(factor, a[rank, j], p, neg_inv)
                    a[i, j] = x - y if x >= y else x + p - y
        rank += 1
        if rank == rows:
            break
    return rank


def _rank_mod_huge_prime(matrix: np.ndarray, p: int) -> int:
    a = np.array(matrix, dtype=object) % p
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        nonzero = np.flatnonzero(a[rank:, col] != 0)
        if nonzero.size == 0:
            continue
        pivot = rank + int(nonzero[0])
        if pivot != rank:
            a[[rank, pivot], :] = a[[pivot, rank], :]
        inv = pow(int(a[rank, col]), -1, p)
        a[rank, :] = (a[rank, :] * inv) % p
        below = a[rank + 1 :, col]
        if below.size:
            a[rank + 1 :, :] = (a[rank + 1 :, :] - np.outer(below, a[rank, :])) % p
        rank += 1
        if rank == rows:
            break
    return rank


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over the field with ``p`` elements."""
    if not isprime(p):
        raise ParameterError(f"{p} is not prime")
    array = np.asarray(matrix)
    if array.ndim != 2:
        raise ParameterError("matrix must be two-dimensional")
    if p < 2**31:
        return int(_rank_mod_small_prime(np.mod(array.astype(np.int64), p), p))
    if p < MONTGOMERY_LIMIT:
        reduced = np.mod(array.astype(np.int64), np.int64(p)).astype(np.uint64)
        neg_inv = (-pow(p, -1, 2**64)) % 2**64
        rank = _rank_mod_large_prime(
            reduced, np.uint64(p), np.uint64(neg_inv), np.uint64(pow(2, 128, p))
        )
        return int(rank)
    return _rank_mod_huge_prime(array, p)


def large_primes_for(matrix: CombMatrix, count: int = 2) -> list[int]:
    """Distinct primes in (2^61, 2^62) drawn from a stream keyed by the matrix."""
    digest = hashlib.blake2b(matrix.supports.tobytes(), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    primes: list[int] = []
    while len(primes) < count:
        start = int(rng.integers(LARGE_PRIME_LOW, LARGE_PRIME_HIGH - 2**20))
        prime = int(nextprime(start))
        if prime not in primes:
            primes.append(prime)
    return primes


def is_singular_exact(
    matrix: CombMatrix, primes: Sequence[int] | None = None
) -> bool:
    """True iff the rational rank is below min(m, n).

    For square inputs this is exact singularity. ``primes`` overrides the two
    random large primes.
    """
    target = min(matrix.m, matrix.n)
    if matrix.has_duplicate_rows():
        return True
    if matrix.is_square and matrix.has_zero_column():
        return True
    integer = matrix.to_int()
    if rank_mod_p(integer, FAST_PRIME) == target:
        return False
    checks = list(primes) if primes is not None else large_primes_for(matrix)
    return all(rank_mod_p(integer, p) < target for p in checks)
