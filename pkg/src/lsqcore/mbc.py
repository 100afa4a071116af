"""Minimal balanced collections: enumeration, weights, balancedness, persistence.

A collection of coalitions is balanced when positive weights exist whose
per-player sums all equal 1, and minimal balanced when additionally no
proper subcollection is balanced; equivalently the coalition indicator
vectors are linearly independent and the weight system has a unique
positive solution.  Collections of size m exist only for 2 <= m <= n,
apart from the trivial collection {N}.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .game import Game, coalition_size, grand_coalition

FORMAT_TAG = "lsqcore-mbc 1"

# Independence and consistency cutoffs for the float screen inside the
# enumerator.  Indicator columns are 0/1 integers in dimension <= 8, so a
# genuinely dependent/consistent configuration sits at exactly 0 while the
# nearest nonzero case is bounded away by an inverse determinant; anything
# near these thresholds is then settled exactly over the rationals.
_INDEP_TOL = 1e-7
_CONSIST_TOL = 1e-9


def _coalition_key(mask: int) -> tuple[int, int]:
    return (coalition_size(mask), mask)


@dataclass(frozen=True)
class BalancedCollection:
    """Coalition bitmasks in canonical (size, mask) order with their exact weights."""

    coalitions: tuple[int, ...]
    weights: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.coalitions)

    def weights_float(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    def sort_key(self):
        return (self.size, tuple(_coalition_key(m) for m in self.coalitions))


@dataclass(eq=False)
class MbcCatalog:
    """All minimal balanced collections for one n, canonically ordered."""

    n: int
    collections: tuple[BalancedCollection, ...]
    include_trivial: bool
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.collections)

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        """Dense (collections x 2**n) matrix of balancing weights."""
        W = np.zeros((len(self.collections), 1 << self.n))
        for row, B in enumerate(self.collections):
            for mask, w in zip(B.coalitions, B.weights):
                W[row, mask] = float(w)
        return W

    def nontrivial(self) -> "MbcCatalog":
        """The same catalog without the trivial collection {N}."""
        if not self.include_trivial:
            return self
        N = grand_coalition(self.n)
        kept = tuple(B for B in self.collections if B.coalitions != (N,))
        return MbcCatalog(self.n, kept, False, dict(self.meta))


def _exact_weights(coalitions: Sequence[int], n: int):
    """Unique solution of the per-player weight equations over the rationals.

    Returns the weight tuple when the system Sum_{S owns i} w_S = 1 has a
    unique solution, None when it is inconsistent or underdetermined.
    Positivity is not checked here.
    """
    r = len(coalitions)
    aug = [
        [Fraction((mask >> i) & 1) for mask in coalitions] + [Fraction(1)]
        for i in range(n)
    ]
    pivot_rows = []
    row = 0
    for col in range(r):
        pivot = next((k for k in range(row, n) if aug[k][col] != 0), None)
        if pivot is None:
            return None  # dependent columns: weights not unique
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [a * inv for a in aug[row]]
        for k in range(n):
            if k != row and aug[k][col] != 0:
                factor = aug[k][col]
                aug[k] = [a - factor * b for a, b in zip(aug[k], aug[row])]
        pivot_rows.append(row)
        row += 1
    for k in range(row, n):
        if aug[k][r] != 0:
            return None  # inconsistent
    return tuple(aug[i][r] for i in range(r))


def balancing_weights(coalitions: Iterable, n: int, exact: bool = False):
    """Balancing weights of a minimal balanced collection, or None.

    Certifies "minimal balanced": the indicator columns must be linearly
    independent, the system must be solvable exactly, and every weight must
    be strictly positive.  With exact=True the weights come back as
    Fractions, otherwise as a float array.
    """
    masks = [int(m) for m in coalitions]
    N = grand_coalition(n)
    if len(set(masks)) != len(masks):
        raise ValueError("coalitions must be distinct")
    for m in masks:
        if not 0 < m <= N:
            raise ValueError(f"coalition mask {m} out of range for n={n}")
    weights = _exact_weights(masks, n)
    if weights is None or any(w <= 0 for w in weights):
        return None
    if exact:
        return weights
    return np.array([float(w) for w in weights])


def _canonical_collection(masks: Sequence[int], weights: Sequence[Fraction]) -> BalancedCollection:
    order = sorted(range(len(masks)), key=lambda j: _coalition_key(masks[j]))
    return BalancedCollection(
        tuple(masks[j] for j in order), tuple(weights[j] for j in order)
    )


def trivial_collection(n: int) -> BalancedCollection:
    return BalancedCollection((grand_coalition(n),), (Fraction(1),))


@njit(cache=True)
def _dfs_kernel(n, out, sizes, cap):  # pragma: no cover - exercised via enumerate_mbc
    """Depth-first search emitting every coalition set whose indicator span
    first reaches the all-ones vector with all-positive float weights.

    A branch dies as soon as its columns become dependent (no superset can
    be minimal), as soon as the all-ones vector enters the column span (any
    strict superset would get zero weights on the extra members), or when
    the remaining candidates cannot cover the missing players.  On each
    consistent set the weights come from back-substitution through the
    maintained QR factors; true weights are either 0 or at least 1/9 for
    n <= 6 (square row-subsystems have 0/1 determinant at most 9), so the
    1e-3 positivity threshold cannot misclassify.  Hit row i fills
    out[i, :sizes[i]]; the return value is the hit count, or -1 on buffer
    overflow.
    """
    N = (1 << n) - 1
    ncand = N - 1
    # candidate i is mask i+1; suffix unions for the coverage prune
    suffix = np.zeros(ncand + 1, np.int64)
    for i in range(ncand - 1, -1, -1):
        suffix[i] = suffix[i + 1] | (i + 1)
    basis = np.zeros((n, n))
    R = np.zeros((n, n))
    ones_coef = np.zeros(n)
    lam = np.zeros(n)
    chosen = np.zeros(n, np.int64)
    union = np.zeros(n + 1, np.int64)
    ones_sq = np.zeros(n + 1)
    pos = np.zeros(n + 1, np.int64)
    u = np.zeros(n)
    hits = 0
    depth = 0
    while depth >= 0:
        i = pos[depth]
        if i >= ncand or (union[depth] | suffix[i]) != N:
            depth -= 1
            continue
        pos[depth] = i + 1
        mask = i + 1
        for j in range(n):
            u[j] = float((mask >> j) & 1)
        for b in range(depth):
            dot = 0.0
            for j in range(n):
                dot += basis[b, j] * float((mask >> j) & 1)
            R[b, depth] = dot
            for j in range(n):
                u[j] -= dot * basis[b, j]
        norm_sq = 0.0
        for j in range(n):
            norm_sq += u[j] * u[j]
        if norm_sq < _INDEP_TOL * _INDEP_TOL:
            continue
        inv = 1.0 / np.sqrt(norm_sq)
        R[depth, depth] = np.sqrt(norm_sq)
        coef = 0.0
        for j in range(n):
            basis[depth, j] = u[j] * inv
            coef += basis[depth, j]
        ones_coef[depth] = coef
        new_sq = ones_sq[depth] + coef * coef
        chosen[depth] = mask
        if n - new_sq <= _CONSIST_TOL:
            m = depth + 1
            positive = True
            for k in range(m - 1, -1, -1):
                acc = ones_coef[k]
                for j in range(k + 1, m):
                    acc -= R[k, j] * lam[j]
                lam[k] = acc / R[k, k]
                if lam[k] <= 1e-3:
                    positive = False
                    break
            if positive:
                if hits >= cap:
                    return -1
                for d in range(m):
                    out[hits, d] = chosen[d]
                sizes[hits] = m
                hits += 1
        elif depth + 1 < n:
            union[depth + 1] = union[depth] | mask
            ones_sq[depth + 1] = new_sq
            pos[depth + 1] = i + 1
            depth += 1
    return hits


def enumerate_mbc(n: int, include_trivial: bool = False) -> MbcCatalog:
    """Exhaustively enumerate the minimal balanced collections on n players.

    A jitted depth-first search over proper coalitions finds every set whose
    indicator span contains the all-ones vector before any extension could;
    each hit is then certified (or discarded) by an exact rational solve of
    the weight system, so the catalog carries exact weights.

    n = 6 takes a few minutes; smaller n finish in seconds.
    """
    if not 2 <= n <= 6:
        raise ValueError("exhaustive enumeration supports 2 <= n <= 6")
    cap = 10_000 if n <= 5 else 300_000
    while True:
        out = np.empty((cap, n), np.int64)
        sizes = np.empty(cap, np.int64)
        hits = _dfs_kernel(n, out, sizes, cap)
        if hits >= 0:
            break
        cap *= 4
    found = []
    for row in range(hits):
        masks = [int(m) for m in out[row, : sizes[row]]]
        weights = _exact_weights(masks, n)
        if weights is not None and all(w > 0 for w in weights):
            found.append(_canonical_collection(masks, weights))
    found.sort(key=BalancedCollection.sort_key)
    if include_trivial:
        found.insert(0, trivial_collection(n))
    meta = {"generator": "lsqcore exhaustive dfs", "verification": "exact-rational"}
    return MbcCatalog(n, tuple(found), include_trivial, meta)


def count_by_size(catalog: MbcCatalog) -> dict[int, int]:
    """Histogram of collection sizes."""
    counts: dict[int, int] = {}
    for B in catalog.collections:
        counts[B.size] = counts.get(B.size, 0) + 1
    return counts


@dataclass(frozen=True)
class BalancednessReport:
    balanced: bool
    worst_collection: BalancedCollection
    worst_excess: float


def excesses(g: Game, catalog: MbcCatalog) -> np.ndarray:
    """Per-collection excess Sum lambda_S v(S) - v(N)."""
    if g.n != catalog.n:
        raise ValueError(f"game has n={g.n} but catalog has n={catalog.n}")
    return catalog.weight_matrix @ g.values - g.grand_value


def is_balanced(g: Game, catalog: MbcCatalog, tol: float = 1e-9) -> BalancednessReport:
    """Balancedness test: every collection's excess must stay within tol."""
    ex = excesses(g, catalog)
    worst = int(np.argmax(ex))
    return BalancednessReport(
        balanced=bool(ex[worst] <= tol),
        worst_collection=catalog.collections[worst],
        worst_excess=float(ex[worst]),
    )


def save_catalog(catalog: MbcCatalog, path) -> None:
    """Checksummed line-oriented text format with exact rational weights."""
    lines = [
        FORMAT_TAG,
        f"n={catalog.n}",
        f"include_trivial={int(catalog.include_trivial)}",
        f"count={len(catalog.collections)}",
    ]
    for B in catalog.collections:
        masks = ",".join(str(m) for m in B.coalitions)
        weights = ",".join(f"{w.numerator}/{w.denominator}" for w in B.weights)
        lines.append(f"{masks} {weights}")
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    with open(path, "w") as fh:
        fh.write(body)
        fh.write(f"checksum={digest}\n")


def load_catalog(path) -> MbcCatalog:
    """Load and re-verify a saved catalog.

    Rejects checksum mismatches and any collection whose stored weights are
    not exactly balancing, positive, and unique.
    """
    with open(path) as fh:
        text = fh.read()
    lines = text.splitlines()
    if len(lines) < 5 or not lines[-1].startswith("checksum="):
        raise ValueError("catalog file is truncated or missing its checksum")
    body = "\n".join(lines[:-1]) + "\n"
    expected = lines[-1].split("=", 1)[1]
    if hashlib.sha256(body.encode()).hexdigest() != expected:
        raise ValueError("catalog checksum mismatch")
    if lines[0] != FORMAT_TAG:
        raise ValueError(f"unknown catalog format {lines[0]!r}")
    n = int(lines[1].split("=", 1)[1])
    include_trivial = bool(int(lines[2].split("=", 1)[1]))
    count = int(lines[3].split("=", 1)[1])
    records = lines[4:-1]
    if len(records) != count:
        raise ValueError(f"catalog declares {count} collections, found {len(records)}")
    collections = []
    for line in records:
        mask_part, weight_part = line.split(" ")
        masks = tuple(int(tok) for tok in mask_part.split(","))
        weights = tuple(Fraction(tok) for tok in weight_part.split(","))
        _verify_collection(masks, weights, n)
        collections.append(BalancedCollection(masks, weights))
    return MbcCatalog(n, tuple(collections), include_trivial, {"source": str(path)})


def _verify_collection(masks, weights, n):
    if len(masks) != len(weights):
        raise ValueError("weight count does not match coalition count")
    for i in range(n):
        total = sum(w for m, w in zip(masks, weights) if (m >> i) & 1)
        if total != 1:
            raise ValueError(
                f"player {i + 1} weight sum is {total}, not 1, in collection {masks}"
            )
    if any(w <= 0 for w in weights):
        raise ValueError(f"non-positive weight in collection {masks}")
    if _exact_weights(masks, n) is None:
        raise ValueError(f"collection {masks} is not minimal (dependent columns)")
