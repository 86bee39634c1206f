"""Spin-1/2 configuration bases for periodic chains and two-leg ladders.

Configurations are integer bitmasks: bit ``i`` set means spin-up at site
``i``.  A basis is either the full ``2**n`` space or the subspace with a
fixed total-Sz eigenvalue (fixed popcount), stored as a sorted array so
that membership lookups are binary searches.

Ladder site convention: sites ``2k`` and ``2k+1`` form rung ``k``; the
two legs are the even- and odd-indexed site sequences.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry of the underlying lattice; boundaries are always periodic."""

    geometry: str  # "chain" | "ladder"
    n_sites: int

    def __post_init__(self):
        if self.geometry not in ("chain", "ladder"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.n_sites < 2:
            raise ValueError("need at least two sites")
        if self.geometry == "ladder" and self.n_sites % 2 != 0:
            raise ValueError("ladder needs an even number of sites")

    @property
    def rungs(self) -> int:
        if self.geometry != "ladder":
            raise ValueError("rungs are only defined for ladders")
        return self.n_sites // 2


def chain(n_sites: int) -> LatticeSpec:
    return LatticeSpec("chain", n_sites)


def ladder(n_sites: int) -> LatticeSpec:
    return LatticeSpec("ladder", n_sites)


@dataclass(eq=False)
class SectorBasis:
    """Ordered set of configurations spanning one symmetry sector.

    ``sz_twice`` is twice the total-Sz eigenvalue (an integer so that odd
    chains need no half-integers), or ``None`` for the full space.
    ``configs`` is strictly increasing, which makes ``index_of`` a binary
    search and enumeration order reproducible by construction.
    """

    lattice: LatticeSpec
    sz_twice: int | None
    configs: np.ndarray

    # per-(i, j) flip tables reused by matrix-free operator application
    _pair_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.configs)

    @property
    def n_sites(self) -> int:
        return self.lattice.n_sites

    @property
    def is_full(self) -> bool:
        return self.sz_twice is None

    def pair_table(self, i: int, j: int):
        """Flip targets and alignment for the site pair ``(i, j)``.

        Returns ``(aligned, target, inside)`` where ``aligned[c]`` is True
        when bits i and j agree, ``target[c]`` is the basis index of the
        double-flipped configuration (undefined where ``inside`` is
        False), and ``inside[c]`` marks flips that stay in the sector.
        """
        key = (i, j) if i < j else (j, i)
        hit = self._pair_cache.get(key)
        if hit is not None:
            return hit
        mask = (1 << key[0]) | (1 << key[1])
        flipped = self.configs ^ mask
        bit_i = (self.configs >> key[0]) & 1
        bit_j = (self.configs >> key[1]) & 1
        aligned = bit_i == bit_j
        if self.is_full:
            target = flipped
            inside = np.ones(self.dimension, dtype=bool)
        else:
            # popcount is preserved exactly for anti-aligned flips
            target = np.searchsorted(self.configs, flipped)
            target[aligned] = 0
            inside = ~aligned
        entry = (aligned, target, inside)
        self._pair_cache[key] = entry
        return entry

    def site_bits(self, i: int) -> np.ndarray:
        return ((self.configs >> i) & 1).astype(np.int64)


def enumerate_sector(lattice: LatticeSpec, sz_twice: int | None) -> SectorBasis:
    """Enumerate all configurations of a sector in ascending bitmask order."""
    n = lattice.n_sites
    if sz_twice is None:
        return SectorBasis(lattice, None, np.arange(2 ** n, dtype=np.int64))
    if abs(sz_twice) > n or (n + sz_twice) % 2 != 0:
        raise ValueError(f"sz_twice={sz_twice} impossible for {n} spins")
    n_up = (n + sz_twice) // 2
    all_configs = np.arange(2 ** n, dtype=np.int64)
    pop = popcount(all_configs)
    return SectorBasis(lattice, sz_twice, all_configs[pop == n_up])


def popcount(configs) -> np.ndarray:
    """Number of set bits, vectorized over an int64 array."""
    c = np.asarray(configs, dtype=np.uint64).copy()
    count = np.zeros(c.shape, dtype=np.int64)
    while np.any(c):
        count += (c & np.uint64(1)).astype(np.int64)
        c >>= np.uint64(1)
    return count


def index_of(basis: SectorBasis, config: int) -> int:
    """Rank of ``config`` inside the basis; raises if it is not a member."""
    pos = int(np.searchsorted(basis.configs, config))
    if pos == basis.dimension or basis.configs[pos] != config:
        raise KeyError(f"configuration {config:#x} not in sector")
    return pos


def lift_to_full(basis: SectorBasis, vec: np.ndarray) -> tuple[SectorBasis, np.ndarray]:
    """Embed a sector vector into the full 2**n space."""
    if basis.is_full:
        return basis, vec
    full = enumerate_sector(basis.lattice, None)
    out = np.zeros(full.dimension, dtype=float)
    out[basis.configs] = vec
    return full, out
