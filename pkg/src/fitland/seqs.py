"""Fixed-length sequences over finite alphabets, plus the mutation,
recombination and distance primitives shared by landscapes and explorers.

Sequences are immutable values; every operation returns a new Sequence.
All stochastic operations take an explicit numpy Generator so runs can be
replayed exactly.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Alphabet",
    "DNA",
    "RNA",
    "PROTEIN",
    "Sequence",
    "hamming_distance",
    "mutate",
    "recombine",
    "single_point_neighbors",
    "reverse_complement",
    "random_sequence",
]

_NUCLEIC_KINDS = ("DNA", "RNA")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of symbols a sequence position may take."""

    symbols: str
    kind: str = "custom"

    def __post_init__(self):
        if len(self.symbols) < 2:
            raise ValueError("alphabet needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"alphabet symbols must be unique: {self.symbols!r}")

    @property
    def size(self) -> int:
        return len(self.symbols)

    @cached_property
    def _index(self) -> dict:
        return {ch: i for i, ch in enumerate(self.symbols)}

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValueError(
                f"symbol {symbol!r} not in alphabet {self.symbols!r}"
            ) from None

    @cached_property
    def complement_indices(self) -> tuple:
        """Index map for Watson-Crick complements (nucleic alphabets only)."""
        if self.kind not in _NUCLEIC_KINDS:
            raise ValueError(f"alphabet kind {self.kind!r} has no complement")
        pairs = {"A": "T" if self.kind == "DNA" else "U", "C": "G"}
        pairs.update({v: k for k, v in pairs.items()})
        return tuple(self.index(pairs[ch]) for ch in self.symbols)


DNA = Alphabet("ACGT", kind="DNA")
RNA = Alphabet("ACGU", kind="RNA")
PROTEIN = Alphabet("ACDEFGHIKLMNPQRSTVWY", kind="protein")


@dataclass(frozen=True)
class Sequence:
    """Immutable fixed-length word, stored as symbol indices."""

    indices: tuple
    alphabet: Alphabet

    def __post_init__(self):
        n = self.alphabet.size
        for i in self.indices:
            if not 0 <= i < n:
                raise ValueError(f"symbol index {i} out of range for alphabet")

    @classmethod
    def from_string(cls, s: str, alphabet: Alphabet) -> "Sequence":
        return cls(tuple(alphabet.index(ch) for ch in s), alphabet)

    @classmethod
    def from_code(cls, code: int, length: int, alphabet: Alphabet) -> "Sequence":
        """Decode a big-endian base-A integer into a Sequence."""
        n = alphabet.size
        idx = [0] * length
        for p in range(length - 1, -1, -1):
            code, idx[p] = divmod(code, n)
        return cls(tuple(idx), alphabet)

    def code(self) -> int:
        """Big-endian base-A integer; sorting by code == lexicographic order."""
        c = 0
        for i in self.indices:
            c = c * self.alphabet.size + i
        return c

    def to_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.int8)

    def with_substitution(self, pos: int, symbol_index: int) -> "Sequence":
        idx = list(self.indices)
        idx[pos] = symbol_index
        return Sequence(tuple(idx), self.alphabet)

    def __len__(self) -> int:
        return len(self.indices)

    def __str__(self) -> str:
        return "".join(self.alphabet.symbols[i] for i in self.indices)

    def __repr__(self) -> str:
        return f"Sequence({str(self)!r})"


def _check_comparable(a: Sequence, b: Sequence):
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if a.alphabet != b.alphabet:
        raise ValueError("alphabet mismatch")


def hamming_distance(a: Sequence, b: Sequence) -> int:
    """Number of positions at which two equal-length sequences differ."""
    _check_comparable(a, b)
    return sum(x != y for x, y in zip(a.indices, b.indices))


def mutate(x: Sequence, mu: float, rng: np.random.Generator) -> Sequence:
    """Substitute each position independently with probability mu.

    A substituted position always changes: the replacement is drawn
    uniformly among the other A-1 symbols.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mutation rate must be in [0, 1], got {mu}")
    n = len(x)
    hits = rng.random(n) < mu
    k = int(hits.sum())
    if k == 0:
        return x
    a = x.alphabet.size
    idx = np.array(x.indices, dtype=np.int64)
    # adding a uniform offset in [1, A) mod A never reproduces the old symbol
    idx[hits] = (idx[hits] + rng.integers(1, a, size=k)) % a
    return Sequence(tuple(idx.tolist()), x.alphabet)


def recombine(a: Sequence, b: Sequence, r: float, rng: np.random.Generator):
    """Single scan crossover: at each position the donors swap with
    probability r; returns the two complementary offspring."""
    _check_comparable(a, b)
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"recombination rate must be in [0, 1], got {r}")
    n = len(a)
    swaps = rng.random(n) < r
    take_b = np.cumsum(swaps) % 2 == 1  # parity of swap events so far
    ai = np.array(a.indices, dtype=np.int64)
    bi = np.array(b.indices, dtype=np.int64)
    c1 = np.where(take_b, bi, ai)
    c2 = np.where(take_b, ai, bi)
    return (
        Sequence(tuple(c1.tolist()), a.alphabet),
        Sequence(tuple(c2.tolist()), a.alphabet),
    )


def single_point_neighbors(x: Sequence) -> list:
    """All (A-1)*L sequences at Hamming distance 1, in position-major order."""
    out = []
    for p, cur in enumerate(x.indices):
        for s in range(x.alphabet.size):
            if s != cur:
                out.append(x.with_substitution(p, s))
    return out


def reverse_complement(x: Sequence) -> Sequence:
    """Reverse the sequence and complement every symbol (DNA/RNA only)."""
    comp = x.alphabet.complement_indices
    return Sequence(tuple(comp[i] for i in reversed(x.indices)), x.alphabet)


def random_sequence(length: int, alphabet: Alphabet, rng: np.random.Generator) -> Sequence:
    idx = rng.integers(0, alphabet.size, size=length)
    return Sequence(tuple(idx.tolist()), alphabet)
