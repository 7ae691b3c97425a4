"""The three hashing schemes and the collision-fraction estimator.

Hash values are permutation ranks in [0, D), not re-hashed fingerprints,
so collision semantics are exact. The circulant schemes evaluate the
min through the shift view (one modular index per non-zero) and never
materialize K shifted permutations: O(K * nnz) time, O(D) memory.

Seed conventions (documented, part of the reproducibility contract):

* ``minhash``: permutation k uses ``derive_seed(master_seed, k)``;
* ``cminhash_0pi``: the single permutation uses ``pi_seed`` directly;
* ``cminhash_sigma_pi``: callers hold independent ``sigma_seed`` and
  ``pi_seed``; ``derive_sigma_pi_seeds(master)`` yields the pair
  ``(derive_seed(master, 0), derive_seed(master, 1))`` used by the CLI
  and the experiment runners.

Sketching different vectors is embarrassingly parallel; signatures are
immutable outputs.
"""

from __future__ import annotations

import numpy as np

from .core import BinaryVector, Scheme, Signature, ValidationError
from .perm import (batch_permutations, derive_seed, derive_seeds_np,
                   random_permutation)

__all__ = [
    "minhash", "cminhash_0pi", "cminhash_sigma_pi", "estimate_jaccard",
    "derive_sigma_pi_seeds", "write_signatures", "read_signatures",
    "format_signature_line", "parse_signature_line",
]


def _require_nonempty(v: BinaryVector) -> None:
    if v.is_empty:
        raise ValidationError("undefined hash of empty set")


def derive_sigma_pi_seeds(master_seed: int) -> tuple[int, int]:
    return derive_seed(master_seed, 0), derive_seed(master_seed, 1)


def minhash(v: BinaryVector, master_seed: int, k: int) -> Signature:
    """K independent permutations; hash k is the min rank over non-zeros."""
    _require_nonempty(v)
    if k < 1:
        raise ValidationError("K must be >= 1")
    values = []
    for i in range(k):
        p = random_permutation(v.dim, derive_seed(master_seed, i))
        values.append(min(p.map[j] for j in v.nonzeros))
    return Signature(Scheme.MINHASH_K_PERMS, tuple(values), k, v.dim,
                     (master_seed,))


def _circulant_values(pi_map, nonzeros, dim: int, k: int) -> tuple[int, ...]:
    return tuple(
        min(pi_map[(i - shift) % dim] for i in nonzeros)
        for shift in range(1, k + 1)
    )


def cminhash_0pi(v: BinaryVector, pi_seed: int, k: int) -> Signature:
    """One permutation re-used through shifts 1..K."""
    _require_nonempty(v)
    if not 1 <= k <= v.dim:
        raise ValidationError(f"K must be in [1, {v.dim}] for circulant reuse")
    p = random_permutation(v.dim, pi_seed)
    return Signature(Scheme.CMINHASH_0_PI,
                     _circulant_values(p.map, v.nonzeros, v.dim, k),
                     k, v.dim, (pi_seed,))


def cminhash_sigma_pi(v: BinaryVector, sigma_seed: int, pi_seed: int,
                      k: int) -> Signature:
    """Independent initial shuffle, then the circulant scheme."""
    _require_nonempty(v)
    if not 1 <= k <= v.dim:
        raise ValidationError(f"K must be in [1, {v.dim}] for circulant reuse")
    sigma = random_permutation(v.dim, sigma_seed)
    shuffled = sigma.apply(v)
    pi = random_permutation(v.dim, pi_seed)
    return Signature(Scheme.CMINHASH_SIGMA_PI,
                     _circulant_values(pi.map, shuffled.nonzeros, v.dim, k),
                     k, v.dim, (sigma_seed, pi_seed))


def estimate_jaccard(sv: Signature, sw: Signature) -> float:
    """Fraction of matching hash positions; signatures must be comparable."""
    for field in ("scheme", "k", "dim", "seed_record"):
        if getattr(sv, field) != getattr(sw, field):
            raise ValidationError(
                f"signatures not comparable: {field} differs "
                f"({getattr(sv, field)!r} vs {getattr(sw, field)!r})")
    hits = sum(1 for x, y in zip(sv.values, sw.values) if x == y)
    return hits / sv.k


# ---------------------------------------------------------------------------
# batched twins (bit-identical to the single-vector calls; tested)
# ---------------------------------------------------------------------------

def minhash_perm_matrix(dim: int, master_seed: int, k: int) -> np.ndarray:
    """The K permutations of one minhash call, as a (k, dim) array."""
    seeds = derive_seeds_np(master_seed, np.arange(k, dtype=np.uint64))
    return batch_permutations(dim, seeds)


def min_over_support(perms: np.ndarray, nonzeros) -> np.ndarray:
    """Row-wise min rank over a support set; perms is (n, dim)."""
    return perms[:, np.asarray(nonzeros, dtype=np.int64)].min(axis=1)


def circulant_value_matrix(pi_rows: np.ndarray, support: np.ndarray,
                           k: int) -> np.ndarray:
    """Hash values for shifts 1..k.

    pi_rows is (B, dim); support is (B, nnz) per-row support positions
    (after any initial shuffle). Returns (B, k).
    """
    dim = pi_rows.shape[1]
    shifts = np.arange(1, k + 1, dtype=np.int64)
    idx = (support[:, :, None] - shifts[None, None, :]) % dim
    b, nnz = support.shape
    flat = np.take_along_axis(pi_rows, idx.reshape(b, nnz * k), axis=1)
    return flat.reshape(b, nnz, k).min(axis=1)


# ---------------------------------------------------------------------------
# signature file format: one line per vector,
# "<vector-id>\t<scheme>\t<K>\t<D>\t<seed-hex>\t<space-separated values>"
# (multiple seeds are colon-joined inside the seed-hex field)
# ---------------------------------------------------------------------------

def format_signature_line(vector_id: str, sig: Signature) -> str:
    seeds = ":".join(f"{s:x}" for s in sig.seed_record)
    values = " ".join(str(v) for v in sig.values)
    return f"{vector_id}\t{sig.scheme.value}\t{sig.k}\t{sig.dim}\t{seeds}\t{values}"


def parse_signature_line(line: str) -> tuple[str, Signature]:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 6:
        raise ValidationError(f"malformed signature line: {line!r}")
    vector_id, scheme_s, k_s, d_s, seeds_s, values_s = parts
    try:
        scheme = Scheme(scheme_s)
    except ValueError:
        raise ValidationError(f"unknown scheme {scheme_s!r}") from None
    seeds = tuple(int(s, 16) for s in seeds_s.split(":"))
    values = tuple(int(x) for x in values_s.split())
    return vector_id, Signature(scheme, values, int(k_s), int(d_s), seeds)


def write_signatures(path, items) -> None:
    with open(path, "w") as fh:
        for vector_id, sig in items:
            fh.write(format_signature_line(vector_id, sig) + "\n")


def read_signatures(path) -> list[tuple[str, Signature]]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(parse_signature_line(line))
    return out
