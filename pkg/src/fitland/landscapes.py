"""Ground-truth fitness oracles: tabulated DNA binding landscapes, RNA
duplex-binding landscapes with hidden targets, composite landscapes with
conserved (no-gradient) regions, and brute-force analysis utilities.

Every landscape maps fixed-length sequences to a deterministic fitness in
[0, 1].
"""

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .seqs import RNA, Alphabet, Sequence, random_sequence, reverse_complement

__all__ = [
    "DEFAULT_ENUM_CAP",
    "Landscape",
    "TabulatedLandscape",
    "TFBindingLandscape",
    "RnaBindingLandscape",
    "SwamplandLandscape",
    "ConstantLandscape",
    "LocalOptimaSet",
    "load_tf_landscape",
    "synth_tf_landscape",
    "make_rna_landscape",
    "make_swampland",
    "duplex_score",
    "enumerate_local_optima",
    "path_tour",
]

DEFAULT_ENUM_CAP = 2**28

# Hydrogen-bond-motivated pair scores for duplex alignment, indexed by
# (A, C, G, U) symbol indices. Complementary pairs score by bond count,
# the GU wobble scores 1, everything else is penalized.
PAIR_SCORES = np.full((4, 4), -2, dtype=np.int16)
PAIR_SCORES[0, 3] = PAIR_SCORES[3, 0] = 2  # A:U
PAIR_SCORES[2, 1] = PAIR_SCORES[1, 2] = 3  # G:C
PAIR_SCORES[2, 3] = PAIR_SCORES[3, 2] = 1  # G:U
GAP_PENALTY = np.int16(-3)

_DIGIT_CHUNK = 1 << 18


class Landscape:
    """Deterministic oracle over all length-L words of an alphabet."""

    def __init__(self, name: str, length: int, alphabet: Alphabet):
        self.name = name
        self.length = length
        self.alphabet = alphabet

    @property
    def domain_size(self) -> int:
        return self.alphabet.size ** self.length

    def is_enumerable(self, cap: int = DEFAULT_ENUM_CAP) -> bool:
        return self.domain_size <= cap

    def _check(self, seq: Sequence):
        if len(seq) != self.length or seq.alphabet != self.alphabet:
            raise ValueError(
                f"sequence incompatible with landscape {self.name!r} "
                f"(need length {self.length} over {self.alphabet.symbols!r})"
            )

    def evaluate(self, seq: Sequence) -> float:
        raise NotImplementedError

    def evaluate_batch(self, seqs) -> np.ndarray:
        return np.array([self.evaluate(s) for s in seqs], dtype=np.float64)

    def full_table(self) -> np.ndarray:
        """Fitness for every code 0..A^L-1 (codes are big-endian base-A)."""
        out = np.empty(self.domain_size, dtype=np.float64)
        for code in range(self.domain_size):
            out[code] = self.evaluate(Sequence.from_code(code, self.length, self.alphabet))
        return out


def _digit_matrix(codes: np.ndarray, length: int, nsym: int) -> np.ndarray:
    """Base-A digits of each code, shape (len(codes), length), int8."""
    out = np.empty((codes.shape[0], length), dtype=np.int8)
    rem = codes.astype(np.int64, copy=True)
    for p in range(length - 1, -1, -1):
        out[:, p] = rem % nsym
        rem //= nsym
    return out


class TabulatedLandscape(Landscape):
    """Landscape backed by an explicit fitness table indexed by code."""

    def __init__(self, table: np.ndarray, alphabet: Alphabet, name: str):
        size = table.shape[0]
        length = round(math.log(size, alphabet.size))
        if alphabet.size**length != size:
            raise ValueError(f"table size {size} is not a power of {alphabet.size}")
        super().__init__(name, length, alphabet)
        self._table = np.asarray(table, dtype=np.float64)

    def evaluate(self, seq: Sequence) -> float:
        self._check(seq)
        return float(self._table[seq.code()])

    def evaluate_batch(self, seqs) -> np.ndarray:
        return np.array([self._table[s.code()] for s in seqs], dtype=np.float64)

    def full_table(self) -> np.ndarray:
        return self._table


class TFBindingLandscape(TabulatedLandscape):
    """Protein-DNA binding affinities over all 4^L probes, rescaled to [0, 1]."""

    def __init__(self, table: np.ndarray, name: str, source: str = ""):
        from .seqs import DNA

        super().__init__(table, DNA, name)
        self.source = source


def load_tf_landscape(path) -> TFBindingLandscape:
    """Load a full-coverage (sequence, affinity) table and min-max rescale it.

    The file must be tab- or comma-separated with a `sequence,affinity`
    header and exactly one row for every DNA sequence of the common length.
    """
    from .seqs import DNA

    path = str(path)
    with open(path, newline="") as fh:
        first = fh.readline()
        delim = "\t" if "\t" in first else ","
        header = [c.strip().lower() for c in first.strip().split(delim)]
        if header != ["sequence", "affinity"]:
            raise ValueError(f"expected header 'sequence{delim}affinity', got {header}")
        reader = csv.reader(fh, delimiter=delim)
        length = None
        values: dict = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"line {lineno}: expected 2 columns, got {len(row)}")
            s, a = row[0].strip().upper(), row[1]
            if length is None:
                length = len(s)
            elif len(s) != length:
                raise ValueError(f"line {lineno}: mixed sequence lengths")
            try:
                seq = Sequence.from_string(s, DNA)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            try:
                aff = float(a)
            except ValueError:
                raise ValueError(f"line {lineno}: non-numeric affinity {a!r}") from None
            code = seq.code()
            if code in values:
                raise ValueError(f"line {lineno}: duplicate sequence {s}")
            values[code] = aff
    if length is None:
        raise ValueError("empty table")
    size = 4**length
    if len(values) != size:
        raise ValueError(f"incomplete coverage: {len(values)} rows, need {size}")
    table = np.empty(size, dtype=np.float64)
    for code, aff in values.items():
        table[code] = aff
    lo, hi = table.min(), table.max()
    if hi <= lo:
        raise ValueError("constant affinities: min-max rescale undefined")
    return TFBindingLandscape((table - lo) / (hi - lo), name=f"tf_{_stem(path)}", source=path)


def _stem(path: str) -> str:
    base = path.rsplit("/", 1)[-1]
    return base.rsplit(".", 1)[0]


def synth_tf_landscape(seed: int, length: int = 8, cap: int = DEFAULT_ENUM_CAP) -> TFBindingLandscape:
    """Multi-peaked synthetic stand-in for a measured binding table.

    Fitness is the rescaled best match over a seeded set of random
    position-weight motifs scored at every offset.
    """
    size = 4**length
    if size > cap:
        raise ValueError(f"4^{length} exceeds enumeration cap {cap}")
    if length < 4:
        raise ValueError("synthetic tables need length >= 4 (minimum motif width)")
    rng = np.random.default_rng(seed)
    n_motifs = int(rng.integers(3, 6))
    digits = _digit_matrix(np.arange(size, dtype=np.int64), length, 4)
    best = np.full(size, -np.inf)
    for _ in range(n_motifs):
        width = int(rng.integers(4, min(6, length) + 1))
        weights = rng.normal(0.0, 1.0, size=(width, 4))
        for off in range(length - width + 1):
            score = np.zeros(size)
            for i in range(width):
                score += weights[i][digits[:, off + i]]
            np.maximum(best, score, out=best)
    # weak full-length additive background so positions outside the active
    # motif still matter (otherwise the table is riddled with plateaus)
    background = rng.normal(0.0, 0.15, size=(length, 4))
    for p in range(length):
        best += background[p][digits[:, p]]
    lo, hi = best.min(), best.max()
    table = (best - lo) / (hi - lo)
    return TFBindingLandscape(table, name=f"tf_synth_L{length}_s{seed}", source="synthetic")


def duplex_score(x: Sequence, target: Sequence) -> int:
    """Best local-alignment score of x against the reversed target.

    Scoring: pair matrix (GC=3, AU=2, GU=1, otherwise -2), linear gap -3,
    floored at 0 so the empty alignment is always admissible.
    """
    if x.alphabet.kind != "RNA" or target.alphabet.kind != "RNA":
        raise ValueError("duplex_score requires RNA sequences")
    t_rev = target.to_array()[::-1].copy()
    return int(_kernels.sw_best(x.to_array(), t_rev, PAIR_SCORES, GAP_PENALTY))


class RnaBindingLandscape(Landscape):
    """Binding fitness of a sequence against one or two hidden RNA targets.

    Per-target fitness is the duplex score normalized by the score of the
    target's perfect complement, capped at 1; with two targets the fitness
    is the geometric mean of the per-target values.
    """

    def __init__(self, targets, length: int, name: str):
        super().__init__(name, length, RNA)
        if not 1 <= len(targets) <= 2:
            raise ValueError("need one or two targets")
        for t in targets:
            if t.alphabet.kind != "RNA":
                raise ValueError("targets must be RNA")
            if len(t) > 100:
                raise ValueError("target length must be <= 100")
        self._targets = list(targets)
        self._trev = [t.to_array()[::-1].copy() for t in self._targets]
        self._norms = [float(duplex_score(reverse_complement(t), t)) for t in self._targets]
        if any(z <= 0 for z in self._norms):
            raise ValueError("degenerate target: zero perfect-complement score")
        self._table = None

    @property
    def n_targets(self) -> int:
        return len(self._targets)

    def evaluate(self, seq: Sequence) -> float:
        self._check(seq)
        x = seq.to_array()
        ys = [
            min(float(_kernels.sw_best(x, tr, PAIR_SCORES, GAP_PENALTY)) / z, 1.0)
            for tr, z in zip(self._trev, self._norms)
        ]
        if len(ys) == 1:
            return ys[0]
        return math.sqrt(ys[0] * ys[1])

    def evaluate_batch(self, seqs) -> np.ndarray:
        mat = np.array([s.indices for s in seqs], dtype=np.int8)
        for s in seqs:
            self._check(s)
        return self._fitness_of_matrix(mat)

    def _fitness_of_matrix(self, mat: np.ndarray) -> np.ndarray:
        ys = []
        scores = np.empty(mat.shape[0], dtype=np.int32)
        for tr, z in zip(self._trev, self._norms):
            _kernels.sw_best_many(mat, tr, PAIR_SCORES, GAP_PENALTY, scores)
            ys.append(np.minimum(scores.astype(np.float64) / z, 1.0))
        if len(ys) == 1:
            return ys[0]
        return np.sqrt(ys[0] * ys[1])

    def full_table(self) -> np.ndarray:
        if self._table is None:
            size = self.domain_size
            table = np.empty(size, dtype=np.float64)
            for start in range(0, size, _DIGIT_CHUNK):
                codes = np.arange(start, min(start + _DIGIT_CHUNK, size), dtype=np.int64)
                digits = _digit_matrix(codes, self.length, 4)
                table[start : start + codes.shape[0]] = self._fitness_of_matrix(digits)
            self._table = table
        return self._table


def make_rna_landscape(
    seed: int,
    length: int,
    n_targets: int = 1,
    target_length: int | None = None,
    name: str | None = None,
) -> RnaBindingLandscape:
    """Seeded RNA binding landscape; targets stay hidden inside the oracle."""
    rng = np.random.default_rng(seed)
    tl = length if target_length is None else target_length
    targets = [random_sequence(tl, RNA, rng) for _ in range(n_targets)]
    if name is None:
        name = f"rna_L{length}_t{n_targets}_s{seed}"
    return RnaBindingLandscape(targets, length=length, name=name)


class SwamplandLandscape(Landscape):
    """Composite landscape with a conserved prefix: any sequence that does
    not match the wildtype on the first ceil(L/5) positions scores 0."""

    def __init__(self, base: Landscape, wildtype: Sequence, name: str | None = None):
        if len(wildtype) != base.length or wildtype.alphabet != base.alphabet:
            raise ValueError("wildtype incompatible with base landscape")
        super().__init__(name or f"swamp_{base.name}", base.length, base.alphabet)
        self.base = base
        self.wildtype = wildtype
        self.n_conserved = math.ceil(base.length / 5)
        self._pattern = wildtype.indices[: self.n_conserved]

    def mask_ok(self, seq: Sequence) -> bool:
        return seq.indices[: self.n_conserved] == self._pattern

    def evaluate(self, seq: Sequence) -> float:
        self._check(seq)
        if not self.mask_ok(seq):
            return 0.0
        return self.base.evaluate(seq)

    def evaluate_batch(self, seqs) -> np.ndarray:
        out = self.base.evaluate_batch(seqs)
        ok = np.array([self.mask_ok(s) for s in seqs], dtype=bool)
        out[~ok] = 0.0
        return out

    def full_table(self) -> np.ndarray:
        table = self.base.full_table().copy()
        size = self.domain_size
        nsym = self.alphabet.size
        for start in range(0, size, _DIGIT_CHUNK):
            codes = np.arange(start, min(start + _DIGIT_CHUNK, size), dtype=np.int64)
            digits = _digit_matrix(codes, self.length, nsym)
            bad = np.zeros(codes.shape[0], dtype=bool)
            for p in range(self.n_conserved):
                bad |= digits[:, p] != self._pattern[p]
            table[codes[bad]] = 0.0
        return table


def make_swampland(
    seed: int,
    length: int,
    n_targets: int = 2,
    target_length: int | None = None,
    wildtype: Sequence | None = None,
) -> SwamplandLandscape:
    """Seeded Swampland: composite RNA landscape plus a conserved prefix."""
    rng = np.random.default_rng(seed)
    tl = length if target_length is None else target_length
    targets = [random_sequence(tl, RNA, rng) for _ in range(n_targets)]
    if wildtype is None:
        wildtype = random_sequence(length, RNA, rng)
    base = RnaBindingLandscape(
        targets, length=length, name=f"rna_L{length}_t{n_targets}_s{seed}"
    )
    return SwamplandLandscape(base, wildtype)


class ConstantLandscape(Landscape):
    """Flat landscape; useful to probe explorer behavior without gradients."""

    def __init__(self, length: int, alphabet: Alphabet = RNA, value: float = 0.5, name: str | None = None):
        if not 0.0 <= value <= 1.0:
            raise ValueError("value must be in [0, 1]")
        super().__init__(name or f"constant_{value}", length, alphabet)
        self.value = float(value)

    def evaluate(self, seq: Sequence) -> float:
        self._check(seq)
        return self.value

    def evaluate_batch(self, seqs) -> np.ndarray:
        return np.full(len(seqs), self.value, dtype=np.float64)

    def full_table(self) -> np.ndarray:
        return np.full(self.domain_size, self.value, dtype=np.float64)


@dataclass
class LocalOptimaSet:
    """Strict local optima above a fitness threshold."""

    threshold: float
    sequences: list
    fitnesses: np.ndarray

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(s.indices for s in self.sequences)

    def __len__(self) -> int:
        return len(self.sequences)

    def __contains__(self, seq: Sequence) -> bool:
        return seq.indices in self._members

    def count_above(self, y_tau: float, max_tol: float = 1e-9) -> int:
        """Count optima above y_tau; a threshold of exactly 1 counts
        top-of-scale hits (fitness >= 1 - max_tol) since strict > 1 is
        empty on normalized landscapes."""
        if y_tau == 1.0:
            return int((self.fitnesses >= 1.0 - max_tol).sum())
        return int((self.fitnesses > y_tau).sum())

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sequence", "fitness"])
            for s, f in zip(self.sequences, self.fitnesses):
                w.writerow([str(s), repr(float(f))])

    @classmethod
    def load_csv(cls, path, alphabet: Alphabet, threshold: float = 0.0) -> "LocalOptimaSet":
        seqs, fits = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [c.strip().lower() for c in header] != ["sequence", "fitness"]:
                raise ValueError(f"bad optima CSV header: {header}")
            for row in reader:
                seqs.append(Sequence.from_string(row[0], alphabet))
                fits.append(float(row[1]))
        return cls(threshold=threshold, sequences=seqs, fitnesses=np.array(fits))


def enumerate_local_optima(
    landscape: Landscape, y_tau: float, cap: int = DEFAULT_ENUM_CAP
) -> LocalOptimaSet:
    """Exact set of sequences with fitness > y_tau whose every
    single-substitution neighbor is strictly lower."""
    if landscape.domain_size > cap:
        raise ValueError(
            f"domain size {landscape.domain_size} exceeds enumeration cap {cap}"
        )
    table = landscape.full_table()
    mask = _kernels.local_optima_mask(table, landscape.length, landscape.alphabet.size)
    mask &= table > y_tau
    codes = np.nonzero(mask)[0]
    seqs = [Sequence.from_code(int(c), landscape.length, landscape.alphabet) for c in codes]
    return LocalOptimaSet(threshold=y_tau, sequences=seqs, fitnesses=table[codes].copy())


def path_tour(
    landscape: Landscape,
    a: Sequence,
    b: Sequence,
    n_walks: int = 30,
    rng: np.random.Generator | None = None,
) -> list:
    """Fitness profiles along random shortest mutational paths from a to b.

    Each walk applies the differing positions in a random order; profiles
    have hamming_distance(a, b) + 1 entries starting at phi(a) and ending
    at phi(b).
    """
    landscape._check(a)
    landscape._check(b)
    if rng is None:
        rng = np.random.default_rng(0)
    diff = [p for p in range(len(a)) if a.indices[p] != b.indices[p]]
    profiles = []
    fa = landscape.evaluate(a)
    for _ in range(n_walks):
        order = rng.permutation(len(diff))
        cur = a
        prof = [fa]
        for k in order:
            cur = cur.with_substitution(diff[k], b.indices[diff[k]])
            prof.append(landscape.evaluate(cur))
        profiles.append(prof)
    return profiles
