import csv

import numpy as np
import pytest

from fitland.landscapes import (
    ConstantLandscape,
    LocalOptimaSet,
    RnaBindingLandscape,
    TabulatedLandscape,
    duplex_score,
    enumerate_local_optima,
    load_tf_landscape,
    make_rna_landscape,
    make_swampland,
    path_tour,
    synth_tf_landscape,
)
from fitland.seqs import (
    RNA,
    Alphabet,
    Sequence,
    hamming_distance,
    random_sequence,
    reverse_complement,
    single_point_neighbors,
)


def rna(s):
    return Sequence.from_string(s, RNA)


def brute_local_alignment(x: str, y: str) -> int:
    """Exhaustive local alignment score by recursive path enumeration.

    Independent oracle for duplex_score; only usable on short strings.
    """
    pair = {("G", "C"): 3, ("C", "G"): 3, ("A", "U"): 2, ("U", "A"): 2,
            ("G", "U"): 1, ("U", "G"): 1}
    gap = -3

    def extend(i, j):
        best = 0  # stopping here is always allowed
        if i < len(x) and j < len(y):
            best = max(best, pair.get((x[i], y[j]), -2) + extend(i + 1, j + 1))
        if i < len(x):
            best = max(best, gap + extend(i + 1, j))
        if j < len(y):
            best = max(best, gap + extend(i, j + 1))
        return best

    y = y[::-1]  # duplex alignment runs against the reversed target
    return max(extend(i, j) for i in range(len(x) + 1) for j in range(len(y) + 1))


def naive_local_optima(landscape, y_tau):
    """Independent double-loop optima finder used to cross-check enumeration."""
    out = []
    for code in range(landscape.domain_size):
        s = Sequence.from_code(code, landscape.length, landscape.alphabet)
        f = landscape.evaluate(s)
        if f <= y_tau:
            continue
        if all(landscape.evaluate(n) < f for n in single_point_neighbors(s)):
            out.append(s)
    return out


class TestDuplexScore:
    def test_four_au_pairs(self):
        assert duplex_score(rna("AAAA"), rna("UUUU")) == 8

    def test_no_complementary_pairs_floors_at_zero(self):
        assert duplex_score(rna("GGGG"), rna("GGGG")) == 0

    def test_perfect_complement_scores_sum_of_pairs(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            t = random_sequence(12, RNA, rng)
            expected = sum(3 if t.alphabet.symbols[i] in "GC" else 2 for i in t.indices)
            assert duplex_score(reverse_complement(t), t) == expected

    def test_symmetry(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            a = random_sequence(9, RNA, rng)
            b = random_sequence(13, RNA, rng)
            assert duplex_score(a, b) == duplex_score(b, a)

    def test_matches_brute_force_on_short_strings(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            a = random_sequence(int(rng.integers(1, 6)), RNA, rng)
            b = random_sequence(int(rng.integers(1, 6)), RNA, rng)
            assert duplex_score(a, b) == brute_local_alignment(str(a), str(b))

    def test_rejects_non_rna(self):
        from fitland.seqs import DNA

        with pytest.raises(ValueError):
            duplex_score(Sequence.from_string("ACGT", DNA), rna("ACGU"))


class TestRnaLandscape:
    def test_perfect_complement_is_global_max_with_fitness_one(self):
        ls = make_rna_landscape(3, 10)  # target length defaults to L
        best = ls.full_table().max()
        assert best == pytest.approx(1.0)
        # recover the argmax and confirm it is a strict global optimum
        code = int(np.argmax(ls.full_table()))
        top = Sequence.from_code(code, 10, RNA)
        assert ls.evaluate(top) == 1.0

    def test_two_target_fitness_is_geometric_mean(self):
        t1, t2 = rna("GGCCAAUUGG"), rna("AUAUGCGCAU")
        ls = RnaBindingLandscape([t1, t2], length=10, name="x")
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = random_sequence(10, RNA, rng)
            z1 = duplex_score(reverse_complement(t1), t1)
            z2 = duplex_score(reverse_complement(t2), t2)
            y1 = min(duplex_score(x, t1) / z1, 1.0)
            y2 = min(duplex_score(x, t2) / z2, 1.0)
            assert ls.evaluate(x) == pytest.approx(np.sqrt(y1 * y2), abs=1e-12)

    def test_outputs_in_unit_interval(self):
        ls = make_rna_landscape(8, 14, n_targets=2)
        rng = np.random.default_rng(1)
        xs = [random_sequence(14, RNA, rng) for _ in range(100_000)]
        ys = ls.evaluate_batch(xs)
        assert ys.min() >= 0.0 and ys.max() <= 1.0

    def test_batch_matches_scalar_exactly(self):
        ls = make_rna_landscape(5, 12, n_targets=2, target_length=15)
        rng = np.random.default_rng(2)
        xs = [random_sequence(12, RNA, rng) for _ in range(50)]
        batch = ls.evaluate_batch(xs)
        for x, y in zip(xs, batch):
            assert ls.evaluate(x) == y

    def test_rejects_wrong_length_query(self):
        ls = make_rna_landscape(3, 10)
        with pytest.raises(ValueError):
            ls.evaluate(rna("ACGU"))

    def test_target_length_cap(self):
        with pytest.raises(ValueError):
            make_rna_landscape(0, 10, target_length=101)


class TestSwampland:
    def test_mask_violation_zeroes_fitness(self):
        ls = make_swampland(7, 10, n_targets=2)
        wt = ls.wildtype
        assert ls.evaluate(wt) == ls.base.evaluate(wt)
        # altering a conserved position kills the sequence
        bad = wt.with_substitution(0, (wt.indices[0] + 1) % 4)
        assert ls.evaluate(bad) == 0.0

    def test_conserves_a_fifth(self):
        ls = make_swampland(7, 10)
        assert ls.n_conserved == 2
        assert make_swampland(7, 14).n_conserved == 3

    def test_pointwise_below_base_with_equality_on_mask(self):
        ls = make_swampland(11, 10, n_targets=2)
        rng = np.random.default_rng(0)
        xs = [random_sequence(10, RNA, rng) for _ in range(500)]
        ys = ls.evaluate_batch(xs)
        base = ls.base.evaluate_batch(xs)
        assert (ys <= base).all()
        for x, y, b in zip(xs, ys, base):
            if ls.mask_ok(x):
                assert y == b
            else:
                assert y == 0.0

    def test_full_table_respects_mask(self):
        ls = make_swampland(3, 8)
        tab = ls.full_table()
        rng = np.random.default_rng(5)
        for _ in range(200):
            x = random_sequence(8, RNA, rng)
            assert tab[x.code()] == ls.evaluate(x)


class TestTfTables:
    def test_synth_is_deterministic(self):
        a = synth_tf_landscape(5, 6)
        b = synth_tf_landscape(5, 6)
        assert np.array_equal(a.full_table(), b.full_table())

    def test_synth_rescaled(self):
        t = synth_tf_landscape(0, 6).full_table()
        assert t.min() == 0.0 and t.max() == 1.0

    def test_synth_multipeaked_above_075(self):
        ls = synth_tf_landscape(0, 8)
        assert len(enumerate_local_optima(ls, 0.75)) > 1

    def test_load_roundtrip(self, tmp_path):
        ls = synth_tf_landscape(1, 4)
        path = tmp_path / "tf.tsv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, delimiter="\t")
            w.writerow(["sequence", "affinity"])
            for code in range(ls.domain_size):
                s = Sequence.from_code(code, 4, ls.alphabet)
                w.writerow([str(s), repr(2.0 + 3.0 * ls.evaluate(s))])
        loaded = load_tf_landscape(path)
        assert np.allclose(loaded.full_table(), ls.full_table())
        assert loaded.full_table().max() == 1.0

    def _write_rows(self, path, rows, delimiter=","):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, delimiter=delimiter)
            w.writerow(["sequence", "affinity"])
            w.writerows(rows)

    def test_load_rejects_duplicate(self, tmp_path):
        from fitland.seqs import DNA

        path = tmp_path / "dup.csv"
        rows = [[str(Sequence.from_code(c, 2, DNA)), c] for c in range(16)]
        rows[3][0] = rows[2][0]
        self._write_rows(path, rows)
        with pytest.raises(ValueError, match="duplicate"):
            load_tf_landscape(path)

    def test_load_rejects_incomplete(self, tmp_path):
        from fitland.seqs import DNA

        path = tmp_path / "short.csv"
        rows = [[str(Sequence.from_code(c, 2, DNA)), c] for c in range(15)]
        self._write_rows(path, rows)
        with pytest.raises(ValueError, match="coverage"):
            load_tf_landscape(path)

    def test_load_rejects_non_numeric(self, tmp_path):
        from fitland.seqs import DNA

        path = tmp_path / "bad.csv"
        rows = [[str(Sequence.from_code(c, 2, DNA)), c] for c in range(16)]
        rows[5][1] = "high"
        self._write_rows(path, rows)
        with pytest.raises(ValueError, match="non-numeric"):
            load_tf_landscape(path)

    def test_load_rejects_mixed_lengths(self, tmp_path):
        from fitland.seqs import DNA

        path = tmp_path / "mixed.csv"
        rows = [[str(Sequence.from_code(c, 2, DNA)), c] for c in range(16)]
        rows[7][0] = "ACG"
        self._write_rows(path, rows)
        with pytest.raises(ValueError, match="mixed"):
            load_tf_landscape(path)

    def test_load_rejects_constant(self, tmp_path):
        from fitland.seqs import DNA

        path = tmp_path / "const.csv"
        rows = [[str(Sequence.from_code(c, 2, DNA)), 1.0] for c in range(16)]
        self._write_rows(path, rows)
        with pytest.raises(ValueError, match="constant"):
            load_tf_landscape(path)


class TestLocalOptima:
    def test_two_by_two_example(self):
        ab = Alphabet("01")
        ls = TabulatedLandscape(np.array([0.1, 0.5, 0.4, 0.2]), ab, "toy")
        opt = enumerate_local_optima(ls, 0.0)
        assert {str(s) for s in opt.sequences} == {"01", "10"}

    def test_constant_landscape_has_no_strict_optima(self):
        ls = ConstantLandscape(4, RNA, 0.5)
        assert len(enumerate_local_optima(ls, 0.0)) == 0

    def test_threshold_filters(self):
        ab = Alphabet("01")
        ls = TabulatedLandscape(np.array([0.1, 0.5, 0.4, 0.2]), ab, "toy")
        assert len(enumerate_local_optima(ls, 0.45)) == 1
        assert len(enumerate_local_optima(ls, 1.0)) == 0

    def test_cap_guard(self):
        ls = make_rna_landscape(0, 10)
        with pytest.raises(ValueError, match="cap"):
            enumerate_local_optima(ls, 0.0, cap=1000)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_on_small_domains(self, seed):
        ls = synth_tf_landscape(seed, 5)
        fast = enumerate_local_optima(ls, 0.5)
        naive = naive_local_optima(ls, 0.5)
        assert [str(s) for s in fast.sequences] == [str(s) for s in naive]

    def test_membership_and_counts(self):
        ls = synth_tf_landscape(0, 6)
        opt = enumerate_local_optima(ls, 0.0)
        assert all(s in opt for s in opt.sequences)
        assert opt.count_above(0.75) == len(enumerate_local_optima(ls, 0.75))
        assert opt.count_above(2.0) == 0

    def test_csv_roundtrip(self, tmp_path):
        ls = synth_tf_landscape(2, 5)
        opt = enumerate_local_optima(ls, 0.25)
        path = tmp_path / "optima.csv"
        opt.save_csv(path)
        loaded = LocalOptimaSet.load_csv(path, ls.alphabet, threshold=0.25)
        assert [str(s) for s in loaded.sequences] == [str(s) for s in opt.sequences]
        assert np.array_equal(loaded.fitnesses, opt.fitnesses)


class TestPathTour:
    def test_identical_endpoints(self):
        ls = make_rna_landscape(0, 8)
        rng = np.random.default_rng(0)
        a = random_sequence(8, RNA, rng)
        profiles = path_tour(ls, a, a, n_walks=5, rng=rng)
        assert len(profiles) == 5
        assert all(p == [ls.evaluate(a)] for p in profiles)

    def test_distance_one_walks_are_identical(self):
        ls = make_rna_landscape(0, 8)
        rng = np.random.default_rng(1)
        a = random_sequence(8, RNA, rng)
        b = a.with_substitution(3, (a.indices[3] + 1) % 4)
        profiles = path_tour(ls, a, b, n_walks=4, rng=rng)
        assert all(len(p) == 2 for p in profiles)
        assert len({tuple(p) for p in profiles}) == 1

    def test_profile_shape_and_endpoints(self):
        ls = make_rna_landscape(2, 10)
        rng = np.random.default_rng(3)
        a = random_sequence(10, RNA, rng)
        b = random_sequence(10, RNA, rng)
        d = hamming_distance(a, b)
        for p in path_tour(ls, a, b, n_walks=6, rng=rng):
            assert len(p) == d + 1
            assert p[0] == ls.evaluate(a)
            assert p[-1] == ls.evaluate(b)

    def test_seeded_reproducibility(self):
        ls = make_rna_landscape(2, 10)
        a = random_sequence(10, RNA, np.random.default_rng(0))
        b = random_sequence(10, RNA, np.random.default_rng(1))
        p1 = path_tour(ls, a, b, n_walks=8, rng=np.random.default_rng(42))
        p2 = path_tour(ls, a, b, n_walks=8, rng=np.random.default_rng(42))
        assert p1 == p2
