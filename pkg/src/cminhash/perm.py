"""Seeded permutations with bit-exact circulant-shift access.

All randomness in this package flows through one documented generator so
that signatures are reproducible from a single master seed:

* stream: SplitMix64 (state += 0x9E3779B97F4A7C15; output is the standard
  64-bit finalizer), seeded directly with a 64-bit value;
* shuffle: descending Fisher-Yates, ``j = next_u64() % (i + 1)``;
* child seeds: ``derive_seed(master, i)`` is the i-th output of the
  SplitMix64 stream seeded at ``master``, so (master, index) pairs map to
  independent-looking child seeds without storing any state.

A vectorized numpy twin of the shuffle exists for batch workloads and is
tested to produce bit-identical permutations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BinaryVector, ValidationError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (Stafford variant 13)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Child seed for (master, i, j, ...), chaining one stream step per index."""
    s = master & MASK64
    for i in indices:
        s = mix64((s + ((i & MASK64) + 1) * GOLDEN) & MASK64)
    return s


class SplitMix64:
    """Minimal deterministic 64-bit generator; the package-wide source."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def randbelow(self, n: int) -> int:
        return self.next_u64() % n


_NP_GOLDEN = np.uint64(GOLDEN)
_NP_M1 = np.uint64(_M1)
_NP_M2 = np.uint64(_M2)


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _NP_M1
    z = (z ^ (z >> np.uint64(27))) * _NP_M2
    return z ^ (z >> np.uint64(31))


def derive_seeds_np(master: int | np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Vectorized derive_seed over one index axis."""
    base = np.asarray(master, dtype=np.uint64)
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64_np(base + (idx + np.uint64(1)) * _NP_GOLDEN)


def batch_permutations(dim: int, seeds) -> np.ndarray:
    """Fisher-Yates for many seeds at once; row r equals
    random_permutation(dim, seeds[r]).map bit for bit."""
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    states = np.ascontiguousarray(np.asarray(seeds, dtype=np.uint64))
    n = states.shape[0]
    out = np.tile(np.arange(dim, dtype=np.int64), (n, 1))
    rows = np.arange(n)
    with np.errstate(over="ignore"):
        for i in range(dim - 1, 0, -1):
            states = states + _NP_GOLDEN
            j = (_mix64_np(states) % np.uint64(i + 1)).astype(np.int64)
            tmp = out[rows, i].copy()
            out[rows, i] = out[rows, j]
            out[rows, j] = tmp
    return out


@dataclass(frozen=True, slots=True)
class Permutation:
    """A bijection on {0, ..., dim-1}; map[i] is the image of i."""

    dim: int
    map: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if len(self.map) != self.dim or sorted(self.map) != list(range(self.dim)):
            raise ValidationError("map is not a bijection on [0, dim)")

    def shifted_value(self, k: int, i: int) -> int:
        """Value of the permutation rotated rightward k times, at index i.

        The rotated vector at index i holds map[(i - k) mod dim]; computed
        as a view, the underlying array is never copied.
        """
        if not 0 <= i < self.dim:
            raise ValidationError(f"index {i} out of range [0, {self.dim})")
        return self.map[(i - k) % self.dim]

    def apply(self, v: BinaryVector) -> BinaryVector:
        """Relocate the non-zeros of v: output support is {map[i]}."""
        if v.dim != self.dim:
            raise ValidationError(
                f"dimension mismatch: permutation dim {self.dim}, vector dim {v.dim}"
            )
        return BinaryVector(v.dim, tuple(sorted(self.map[i] for i in v.nonzeros)))


def random_permutation(dim: int, seed: int) -> Permutation:
    """Uniform permutation of [0, dim) from the documented generator;
    identical (dim, seed) yields the identical array on any platform."""
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    arr = list(range(dim))
    rng = SplitMix64(seed)
    for i in range(dim - 1, 0, -1):
        j = rng.randbelow(i + 1)
        arr[i], arr[j] = arr[j], arr[i]
    return Permutation(dim, tuple(arr))


def shifted_value(p: Permutation, k: int, i: int) -> int:
    return p.shifted_value(k, i)


def apply(p: Permutation, v: BinaryVector) -> BinaryVector:
    return p.apply(v)


def dump_permutation(p: Permutation, seed: int) -> str:
    """Debug dump: header line 'dim=<D> seed=<hex>' then the map."""
    return f"dim={p.dim} seed={seed:x}\n" + " ".join(str(x) for x in p.map) + "\n"


def load_permutation(text: str) -> tuple[Permutation, int]:
    lines = text.strip().splitlines()
    if len(lines) != 2 or not lines[0].startswith("dim="):
        raise ValidationError("malformed permutation dump")
    head = dict(part.split("=", 1) for part in lines[0].split())
    dim = int(head["dim"])
    seed = int(head["seed"], 16)
    perm = Permutation(dim, tuple(int(x) for x in lines[1].split()))
    if perm.dim != dim:
        raise ValidationError("permutation dump header/body dim mismatch")
    return perm, seed
