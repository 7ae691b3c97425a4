"""Shared domain types: sparse binary vectors, pair summaries, location
vectors, shift-offset set counts, and sketch signatures.

Everything here is immutable after construction and safe to share across
threads; the operations are pure functions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction


class ValidationError(ValueError):
    """Bad input: dimensions, ranges, formats."""


class DegeneratePairError(ValidationError):
    """Both vectors empty: Jaccard similarity undefined."""


class SelfCheckError(RuntimeError):
    """An internal cross-check failed; indicates a bug, not bad input."""


class Symbol(enum.IntEnum):
    """Per-coordinate classification of a vector pair."""

    MATCH = 0       # both vectors one  ("O")
    MISMATCH = 1    # exactly one is one  ("x")
    BOTH_ZERO = 2   # both zero  ("-")


SYMBOL_CHARS = {Symbol.MATCH: "O", Symbol.MISMATCH: "x", Symbol.BOTH_ZERO: "-"}
_CHAR_SYMBOLS = {"O": Symbol.MATCH, "o": Symbol.MATCH,
                 "x": Symbol.MISMATCH, "X": Symbol.MISMATCH,
                 "-": Symbol.BOTH_ZERO}


class Scheme(enum.Enum):
    MINHASH_K_PERMS = "minhash"
    CMINHASH_0_PI = "c0pi"
    CMINHASH_SIGMA_PI = "csigmapi"


@dataclass(frozen=True, slots=True)
class BinaryVector:
    """Support set of a 0/1 vector: strictly increasing indices in [0, dim)."""

    dim: int
    nonzeros: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        prev = -1
        for i in self.nonzeros:
            if not prev < i < self.dim:
                raise ValidationError(
                    "nonzeros must be strictly increasing and in [0, dim)"
                )
            prev = i

    @property
    def count(self) -> int:
        return len(self.nonzeros)

    @property
    def is_empty(self) -> bool:
        return not self.nonzeros

    @classmethod
    def from_indices(cls, dim: int, indices) -> "BinaryVector":
        idx = sorted(set(indices))
        if idx and len(idx) != len(list(indices)):
            raise ValidationError("duplicate indices")
        return cls(dim, tuple(idx))


@dataclass(frozen=True, slots=True)
class PairSummary:
    """(D, f, a) statistics of a vector pair; J kept exact as a/f."""

    dim: int
    intersection: int   # a
    union_size: int     # f

    def __post_init__(self):
        if not 0 <= self.intersection <= self.union_size <= self.dim:
            raise ValidationError("need 0 <= a <= f <= D")

    @property
    def jaccard_defined(self) -> bool:
        return self.union_size > 0

    @property
    def jaccard_exact(self) -> Fraction:
        if self.union_size == 0:
            raise DegeneratePairError("J undefined: both vectors empty")
        return Fraction(self.intersection, self.union_size)

    @property
    def jaccard(self) -> float:
        return float(self.jaccard_exact)

    @property
    def jaccard_tilde_exact(self) -> Fraction:
        if self.union_size <= 1:
            raise ValidationError("J-tilde needs f > 1")
        return Fraction(self.intersection - 1, self.union_size - 1)

    @property
    def jaccard_tilde(self) -> float:
        return float(self.jaccard_tilde_exact)


@dataclass(frozen=True, slots=True)
class LocationVector:
    """Length-D symbol array classifying each coordinate of a pair."""

    dim: int
    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if len(self.symbols) != self.dim:
            raise ValidationError("symbols length must equal dim")

    def symbol(self, j: int) -> Symbol:
        """Circular access: symbol(j) for j >= dim wraps to j - dim."""
        return self.symbols[j % self.dim]

    @property
    def match_count(self) -> int:
        return sum(1 for s in self.symbols if s == Symbol.MATCH)

    @property
    def union_size(self) -> int:
        return sum(1 for s in self.symbols if s != Symbol.BOTH_ZERO)

    def summary(self) -> PairSummary:
        return PairSummary(self.dim, self.match_count, self.union_size)

    def to_string(self) -> str:
        return "".join(SYMBOL_CHARS[s] for s in self.symbols)

    @classmethod
    def from_string(cls, text: str) -> "LocationVector":
        try:
            syms = tuple(_CHAR_SYMBOLS[c] for c in text.strip())
        except KeyError as exc:
            raise ValidationError(f"bad location symbol {exc.args[0]!r}") from None
        return cls(len(syms), syms)


@dataclass(frozen=True, slots=True)
class SetSizes:
    """Counts of the nine ordered symbol pairs (x_i, x_{i+delta}) with
    circular wrap; the six linear identities tie them to (a, f, D)."""

    l0: int  # (O, O)
    l1: int  # (O, x)
    l2: int  # (O, -)
    g0: int  # (-, O)
    g1: int  # (-, x)
    g2: int  # (-, -)
    h0: int  # (x, O)
    h1: int  # (x, x)
    h2: int  # (x, -)
    delta: int

    def __post_init__(self):
        vals = (self.l0, self.l1, self.l2, self.g0, self.g1,
                self.g2, self.h0, self.h1, self.h2)
        if any(v < 0 for v in vals):
            raise ValidationError("set sizes must be non-negative")
        if self.delta < 1:
            raise ValidationError("delta must be >= 1")
        if (self.l0 + self.l1 + self.l2 != self.l0 + self.g0 + self.h0
                or self.g0 + self.g1 + self.g2 != self.l2 + self.g2 + self.h2
                or self.h0 + self.h1 + self.h2 != self.l1 + self.g1 + self.h1):
            raise ValidationError("set sizes violate the row/column identities")

    @property
    def match_count(self) -> int:
        return self.l0 + self.l1 + self.l2

    @property
    def both_zero_count(self) -> int:
        return self.g0 + self.g1 + self.g2

    @property
    def mismatch_count(self) -> int:
        return self.h0 + self.h1 + self.h2


@dataclass(frozen=True, slots=True)
class Signature:
    """K hash values for one vector under one scheme.

    Two signatures are comparable only if scheme, k, dim and seed_record
    all match; seed_record holds the seeds the sketcher consumed.
    """

    scheme: Scheme
    values: tuple[int, ...]
    k: int
    dim: int
    seed_record: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.k:
            raise ValidationError("signature length must equal k")
        if any(not 0 <= v < self.dim for v in self.values):
            raise ValidationError("hash values must lie in [0, dim)")


def summarize_pair(v: BinaryVector, w: BinaryVector) -> PairSummary:
    """Intersection/union statistics of a pair sharing one dimension."""
    if v.dim != w.dim:
        raise ValidationError(f"dimension mismatch: {v.dim} vs {w.dim}")
    sv, sw = set(v.nonzeros), set(w.nonzeros)
    return PairSummary(v.dim, len(sv & sw), len(sv | sw))


def location_vector(v: BinaryVector, w: BinaryVector) -> LocationVector:
    if v.dim != w.dim:
        raise ValidationError(f"dimension mismatch: {v.dim} vs {w.dim}")
    sv, sw = set(v.nonzeros), set(w.nonzeros)
    syms = []
    for i in range(v.dim):
        inv, inw = i in sv, i in sw
        if inv and inw:
            syms.append(Symbol.MATCH)
        elif inv or inw:
            syms.append(Symbol.MISMATCH)
        else:
            syms.append(Symbol.BOTH_ZERO)
    return LocationVector(v.dim, tuple(syms))


def pair_from_location(x: LocationVector) -> tuple[BinaryVector, BinaryVector]:
    """One concrete pair realizing x; mismatches alternate ownership
    (first to v, next to w, ...) in position order."""
    nv, nw = [], []
    flip = False
    for i, s in enumerate(x.symbols):
        if s == Symbol.MATCH:
            nv.append(i)
            nw.append(i)
        elif s == Symbol.MISMATCH:
            (nw if flip else nv).append(i)
            flip = not flip
    return BinaryVector(x.dim, tuple(nv)), BinaryVector(x.dim, tuple(nw))
