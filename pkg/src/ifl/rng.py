"""Counter-based random streams.

Every Monte-Carlo sample owns an independent stream derived from
``(seed, sample_index)``. Draws inside a stream are addressed by *slot*
rather than consumed sequentially, so any subset of the draws can be
computed without generating the rest. This is what makes the scalar
(numba) and vectorized (numpy) simulation lanes bit-identical and makes
parallel evaluation order-independent.

The generator is the splitmix64 finalizer applied to an additive
golden-ratio counter. All arithmetic is modulo 2**64.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB

# Uniform floats are built from the top 53 bits of a 64-bit word.
INV_2_53 = 2.0**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, index: int) -> int:
    """64-bit state identifying stream ``index`` of ``seed``."""
    return mix64((seed & MASK64) ^ mix64(((index + 1) * GOLDEN) & MASK64))


def slot_u64(key: int, slot: int) -> int:
    """Draw ``slot`` of the stream with the given key."""
    return mix64((key + (slot + 1) * GOLDEN) & MASK64)


def u64_to_unit(u: int) -> float:
    """Map a 64-bit word to a float in [0, 1)."""
    return (u >> 11) * INV_2_53


class CounterStream:
    """Slot-addressed view of one sample's random stream.

    ``offset(base)`` returns a view shifted by ``base`` slots, used to
    hand disjoint slot ranges to the datum and hypothesis samplers.
    """

    __slots__ = ("key", "base")

    def __init__(self, seed: int, index: int, base: int = 0, _key: int | None = None):
        self.key = stream_key(seed, index) if _key is None else _key
        self.base = base

    def offset(self, base: int) -> "CounterStream":
        view = object.__new__(CounterStream)
        view.key = self.key
        view.base = self.base + base
        return view

    def u64(self, slot: int) -> int:
        return slot_u64(self.key, self.base + slot)

    def unit(self, slot: int) -> float:
        return u64_to_unit(self.u64(slot))

    def bounded(self, slot: int, n: int) -> int:
        """Integer in [0, n). Modulo mapping; bias is O(n / 2**64)."""
        return self.u64(slot) % n


def sample_without_replacement(stream: CounterStream, first_slot: int,
                               count: int, pool_size: int) -> list[int]:
    """Partial Fisher-Yates draw of ``count`` distinct ints from [0, pool_size).

    Consumes exactly ``count`` slots starting at ``first_slot``. The result
    order is the swap order, which both simulation lanes reproduce.
    """
    if count > pool_size:
        raise ValueError(f"cannot draw {count} from pool of {pool_size}")
    pool = list(range(pool_size))
    for j in range(count):
        r = j + stream.bounded(first_slot + j, pool_size - j)
        pool[j], pool[r] = pool[r], pool[j]
    return pool[:count]
