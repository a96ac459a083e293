"""(n, k, k^2) splitter families built from FKS-style modular hashing.

A partition assigns each of the ``n`` bricks to one of ``k*k`` classes.  A
family *isolates* a set ``S`` of bricks when one of its partitions puts the
members of ``S`` into pairwise different classes.  The family built here
isolates every ``S`` with ``|S| <= k``.

Classes are numbered ``0 .. k*k - 1`` and bricks ``0 .. n - 1``; the hash
itself is evaluated on the one-based brick number.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass


@dataclass(frozen=True)
class Partition:
    class_of: tuple[int, ...]
    k: int

    @property
    def num_classes(self) -> int:
        return self.k * self.k

    def classes(self) -> list[list[int]]:
        """Brick indices of every class, in class order; classes may be empty."""
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for brick, cls in enumerate(self.class_of):
            out[cls].append(brick)
        return out

    def isolates(self, subset: Iterable[int]) -> bool:
        seen = set()
        for brick in subset:
            cls = self.class_of[brick]
            if cls in seen:
                return False
            seen.add(cls)
        return True


@dataclass(frozen=True)
class SplitterFamily:
    partitions: tuple[Partition, ...]
    n: int
    k: int

    def __len__(self) -> int:
        return len(self.partitions)


def primes_below(limit: int) -> list[int]:
    """All primes ``p < limit`` (sieve of Eratosthenes)."""
    if limit <= 2:
        return []
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(limit - 1) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(range(p * p, limit, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def prime_limit(n: int, k: int) -> int:
    """``ceil(k^2 * log2(n))``: the exclusive upper end of the modulus range."""
    if n <= 1:
        return 0
    return math.ceil(k * k * math.log2(n))


def _round_robin(n: int, k: int) -> Partition:
    m = k * k
    return Partition(tuple(i % m for i in range(n)), k)


def build_fks_family(n: int, k: int) -> SplitterFamily:
    """Deterministic splitter family for ``n`` bricks and ``k*k`` classes.

    For every prime ``q`` below ``ceil(k^2 log2 n)`` and every prime
    ``p < q`` the two-level hash ``x -> ((p * (x mod q)) mod q) mod k^2`` is
    included (``x`` the one-based brick number), duplicates removed in
    first-seen order.  The inner ``mod q`` after the multiplication is what
    makes the second level a universal hash; without it multipliers sharing
    a factor with ``k^2`` collapse whole residue classes.  When ``n <= k^2``
    or no prime pair exists the single round-robin partition is returned.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    m = k * k
    if n <= m:
        return SplitterFamily((_round_robin(n, k),), n, k)
    seen: set[tuple[int, ...]] = set()
    partitions: list[Partition] = []
    qs = primes_below(prime_limit(n, k))
    for q in qs:
        for p in qs:
            if p >= q:
                break
            class_of = tuple(((p * (x % q)) % q) % m for x in range(1, n + 1))
            if class_of not in seen:
                seen.add(class_of)
                partitions.append(Partition(class_of, k))
    if not partitions:
        partitions.append(_round_robin(n, k))
    return SplitterFamily(tuple(partitions), n, k)


def verify_isolation(family: SplitterFamily, subset: Iterable[int]) -> bool:
    """True iff some partition of ``family`` puts every member of ``subset`` in its own class."""
    members = tuple(subset)
    if len(members) <= 1:
        return True
    return any(p.isolates(members) for p in family.partitions)
