"""TU-game data model: bitmask coalitions, dense value vectors, Mobius transform.

A game on n players stores one float per coalition in a dense array of
length 2**n indexed by bitmask: bit i set means player i+1 belongs to the
coalition.  The empty coalition (index 0) always has value 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

MAX_PLAYERS = 24


def grand_coalition(n: int) -> int:
    """Bitmask of the full player set {1, ..., n}."""
    return (1 << n) - 1


def coalition_of(members: Iterable[int], n: int) -> int:
    """Bitmask of a coalition given 1-based player labels."""
    mask = 0
    for p in members:
        if not 1 <= p <= n:
            raise ValueError(f"player {p} out of range 1..{n}")
        bit = 1 << (p - 1)
        if mask & bit:
            raise ValueError(f"duplicate player {p}")
        mask |= bit
    return mask


def members(coalition: int) -> tuple[int, ...]:
    """1-based player labels of a coalition bitmask, ascending."""
    out = []
    i = 1
    while coalition:
        if coalition & 1:
            out.append(i)
        coalition >>= 1
        i += 1
    return tuple(out)


def coalition_size(coalition: int) -> int:
    return bin(coalition).count("1")


def parse_coalition(label: str, n: int) -> int:
    """Parse a coalition label: "134" for n <= 9, "1,3,14" with commas for n >= 10."""
    label = label.strip()
    if not label:
        raise ValueError("empty coalition label")
    if "," in label:
        parts = [int(tok) for tok in label.split(",")]
    elif n <= 9:
        parts = [int(ch) for ch in label]
    else:
        # A bare digit string is ambiguous once labels reach 10; accept it
        # only when every character is a valid single-digit player.
        parts = [int(ch) for ch in label]
    return coalition_of(parts, n)


def coalition_label(coalition: int, n: int) -> str:
    """Inverse of parse_coalition, ascending player labels."""
    sep = "" if n <= 9 else ","
    return sep.join(str(p) for p in members(coalition))


def as_coalition(spec, n: int) -> int:
    """Normalize an int bitmask, a label string, or an iterable of players."""
    if isinstance(spec, (int, np.integer)):
        if not 0 <= spec <= grand_coalition(n):
            raise ValueError(f"coalition mask {spec} out of range for n={n}")
        return int(spec)
    if isinstance(spec, str):
        return parse_coalition(spec, n)
    return coalition_of(spec, n)


@dataclass(frozen=True, eq=False)
class Game:
    """A TU-game: player count n and a dense value vector over all 2**n coalitions."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        if not 2 <= self.n <= MAX_PLAYERS:
            raise ValueError(f"n must be in 2..{MAX_PLAYERS}, got {self.n}")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (1 << self.n,):
            raise ValueError(f"values must have length 2**{self.n}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("game values must be finite")
        if vals[0] != 0.0:
            raise ValueError("the empty coalition must have value 0")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def grand(self) -> int:
        return grand_coalition(self.n)

    @property
    def grand_value(self) -> float:
        return float(self.values[-1])

    def value(self, coalition) -> float:
        return float(self.values[as_coalition(coalition, self.n)])

    def allclose(self, other: "Game", tol: float = 1e-12) -> bool:
        return self.n == other.n and bool(
            np.all(np.abs(self.values - other.values) <= tol)
        )


@dataclass(frozen=True, eq=False)
class MobiusVector:
    """Coordinates of a game in the unanimity basis (Harsanyi dividends)."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (1 << self.n,):
            raise ValueError(f"coeffs must have length 2**{self.n}")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)


def make_game(n: int, assignments: Mapping | None = None) -> Game:
    """Build a game from a coalition -> value map; unspecified coalitions are 0.

    Keys may be bitmasks, label strings ("13"), or iterables of player labels.
    Assigning a nonzero value to the empty coalition is rejected.
    """
    vals = np.zeros(1 << n)
    if assignments:
        for key, value in assignments.items():
            mask = as_coalition(key, n)
            value = float(value)
            if not np.isfinite(value):
                raise ValueError(f"non-finite value for coalition {key!r}")
            if mask == 0 and value != 0.0:
                raise ValueError("the empty coalition cannot have a nonzero value")
            vals[mask] = value
    return Game(n, vals)


def dirac(n: int, coalition) -> Game:
    """The game worth 1 at the given nonempty coalition, 0 elsewhere."""
    mask = as_coalition(coalition, n)
    if mask == 0:
        raise ValueError("dirac requires a nonempty coalition")
    vals = np.zeros(1 << n)
    vals[mask] = 1.0
    return Game(n, vals)


def unanimity(n: int, coalition) -> Game:
    """The game worth 1 at every superset of the given nonempty coalition."""
    mask = as_coalition(coalition, n)
    if mask == 0:
        raise ValueError("unanimity requires a nonempty coalition")
    all_masks = np.arange(1 << n)
    vals = ((all_masks & mask) == mask).astype(float)
    return Game(n, vals)


def _subset_transform(arr: np.ndarray, n: int, sign: float) -> np.ndarray:
    # One pass per player; axis k of the (2,)*n view is the k-th bit.
    out = arr.astype(float).copy().reshape((2,) * n)
    upper = [slice(None)] * n
    lower = [slice(None)] * n
    for axis in range(n):
        upper[axis], lower[axis] = 1, 0
        out[tuple(upper)] += sign * out[tuple(lower)]
        upper[axis] = lower[axis] = slice(None)
    return out.reshape(1 << n)


def mobius(g: Game) -> MobiusVector:
    """Mobius transform m(S) = sum over T subset of S of (-1)^(|S|-|T|) v(T)."""
    return MobiusVector(g.n, _subset_transform(g.values, g.n, -1.0))


def inverse_mobius(m: MobiusVector) -> Game:
    """Zeta transform v(S) = sum over T subset of S of m(T); inverse of mobius."""
    return Game(m.n, _subset_transform(m.coeffs, m.n, +1.0))


def coalition_value(x, coalition, n: int | None = None) -> float:
    """x(S): the sum of the payoff coordinates of the coalition's members."""
    x = np.asarray(x, dtype=float)
    if n is None:
        n = x.shape[0]
    mask = as_coalition(coalition, n)
    return float(sum(x[p - 1] for p in members(mask)))


def random_game(n: int, L: float, seed, fix_grand: float | None = None) -> Game:
    """Seeded game with all nonempty coalition values i.i.d. uniform on [-L, L].

    One value is drawn per nonempty coalition in ascending bitmask order from
    numpy's default_rng stream for the given seed, so a (n, L, seed) triple
    identifies the game.  When fix_grand is given, the grand-coalition value
    is overwritten with it after the draw.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    rng = np.random.default_rng(seed)
    vals = np.zeros(1 << n)
    vals[1:] = rng.uniform(-L, L, size=(1 << n) - 1)
    if fix_grand is not None:
        vals[-1] = float(fix_grand)
    return Game(n, vals)


def game_to_dict(g: Game) -> dict:
    """JSON-ready form {"n": ..., "values": {label: value}}; zero entries omitted."""
    values = {}
    for mask in range(1, 1 << g.n):
        v = float(g.values[mask])
        if v != 0.0:
            values[coalition_label(mask, g.n)] = v
    return {"n": g.n, "values": values}


def game_from_dict(data: Mapping) -> Game:
    try:
        n = int(data["n"])
        raw = data["values"]
    except (KeyError, TypeError) as exc:
        raise ValueError("game JSON needs integer 'n' and object 'values'") from exc
    return make_game(n, raw)


def save_game(g: Game, path) -> None:
    with open(path, "w") as fh:
        json.dump(game_to_dict(g), fh, indent=1)
        fh.write("\n")


def load_game(path) -> Game:
    with open(path) as fh:
        return game_from_dict(json.load(fh))
