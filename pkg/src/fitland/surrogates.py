"""Surrogate models: the distance-decayed noisy oracle, the uninformative
null model, closed-form trainable regressors, and an adaptive ensemble.

A model is fitted on the measured data accumulated so far and then answers
point queries; predictions are deterministic between fits (noise draws are
derived from the model seed, the fit epoch and the query sequence, so the
same query always returns the same value within an epoch).
"""

import numpy as np

from . import _kernels
from .seqs import Sequence

__all__ = [
    "MeasuredData",
    "SurrogateModel",
    "NoisyAbstractModel",
    "NullModel",
    "RidgeModel",
    "KnnModel",
    "AdaptiveEnsemble",
    "fit_ridge",
    "fit_knn",
    "r2_score",
]


class MeasuredData:
    """Sequences with ground-truth fitness, accumulated batch by batch.

    Duplicate sequences are overwritten (the overwrite count is kept for
    diagnostics); iteration order is insertion order.
    """

    def __init__(self):
        self._fitness = {}
        self._batches = []
        self.n_overwrites = 0
        self._matrix = None
        self._fits = None

    def add_batch(self, pairs):
        batch = []
        for s, f in pairs:
            f = float(f)
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"fitness {f} outside [0, 1]")
            if s in self._fitness:
                self.n_overwrites += 1
            self._fitness[s] = f
            batch.append((s, f))
        self._batches.append(batch)
        self._matrix = None
        self._fits = None

    def __len__(self):
        return len(self._fitness)

    def __contains__(self, seq):
        return seq in self._fitness

    def get(self, seq, default=None):
        return self._fitness.get(seq, default)

    def pairs(self):
        return list(self._fitness.items())

    def sequences(self):
        return list(self._fitness.keys())

    @property
    def batches(self):
        return self._batches

    @property
    def last_batch(self):
        if not self._batches:
            raise ValueError("no batches measured yet")
        return self._batches[-1]

    def _build(self):
        if self._matrix is None:
            self._matrix = np.array(
                [s.indices for s in self._fitness], dtype=np.int8
            )
            self._fits = np.fromiter(
                self._fitness.values(), dtype=np.float64, count=len(self._fitness)
            )

    def matrix(self) -> np.ndarray:
        """Measured sequences as an (M, L) int8 array, insertion order."""
        self._build()
        return self._matrix

    def fitness_array(self) -> np.ndarray:
        self._build()
        return self._fits


class SurrogateModel:
    """Interface shared by all surrogates."""

    def fit(self, data: MeasuredData):
        raise NotImplementedError

    def predict(self, seq: Sequence) -> float:
        raise NotImplementedError

    def predict_batch(self, seqs) -> np.ndarray:
        return np.array([self.predict(s) for s in seqs], dtype=np.float64)

    def uncertainty(self, seq: Sequence) -> float:
        return 0.0

    def member_predictions(self, seq: Sequence) -> np.ndarray:
        return np.array([self.predict(seq)], dtype=np.float64)


def _require_fitted(measured):
    if not measured:
        raise RuntimeError("model has no measured data; call fit() first")


class NoisyAbstractModel(SurrogateModel):
    """Noise-corrupted oracle with accuracy knob alpha.

    A query at Hamming distance d from the closest measured sequence
    returns alpha^d * phi(x) + (1 - alpha^d) * eps, where eps is an
    exponential draw (capped at 1) whose scale comes from the closest
    measured neighbor's fitness. Measured queries return their fitness
    exactly; alpha = 1 reproduces the ground truth and alpha = 0 is pure
    noise off the measured set.
    """

    def __init__(self, landscape, alpha, seed=0, noise_source="nearest", exp_param="mean"):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        if noise_source not in ("nearest", "empirical"):
            raise ValueError(f"unknown noise source {noise_source!r}")
        if exp_param not in ("mean", "rate"):
            raise ValueError(f"unknown exponential parameterization {exp_param!r}")
        self.landscape = landscape
        self.alpha = float(alpha)
        self.seed = int(seed)
        self.noise_source = noise_source
        self.exp_param = exp_param
        self._epoch = 0
        self._measured = {}
        self._matrix = None
        self._fits = None
        self._eps_cache = {}

    def fit(self, data: MeasuredData):
        self._measured = dict(data.pairs())
        self._matrix = data.matrix()
        self._fits = data.fitness_array()
        self._epoch += 1
        self._eps_cache = {}

    def _draw_eps(self, seq: Sequence, nn_index: int) -> float:
        rng = np.random.default_rng((self.seed, self._epoch) + seq.indices)
        if self.noise_source == "empirical":
            eps = float(rng.choice(self._fits))
        else:
            nn_fit = float(self._fits[nn_index])
            if nn_fit <= 0.0:
                return 0.0 if self.exp_param == "mean" else 1.0
            scale = nn_fit if self.exp_param == "mean" else 1.0 / nn_fit
            eps = float(rng.exponential(scale))
        return min(eps, 1.0)

    def predict(self, seq: Sequence) -> float:
        _require_fitted(self._measured)
        measured = self._measured.get(seq)
        if measured is not None:
            return measured
        if self.alpha == 1.0:
            return self.landscape.evaluate(seq)
        d, idx = _kernels.nearest_measured(seq.to_array(), self._matrix)
        eps = self._eps_cache.get(seq)
        if eps is None:
            eps = self._draw_eps(seq, int(idx))
            self._eps_cache[seq] = eps
        decay = self.alpha ** int(d)
        if decay == 0.0:
            return eps
        return decay * self.landscape.evaluate(seq) + (1.0 - decay) * eps


class NullModel(SurrogateModel):
    """Uninformative baseline: exponential noise around the average
    measured fitness, capped at 1, with no dependence on the query."""

    def __init__(self, seed=0, exp_param="mean"):
        if exp_param not in ("mean", "rate"):
            raise ValueError(f"unknown exponential parameterization {exp_param!r}")
        self.seed = int(seed)
        self.exp_param = exp_param
        self._epoch = 0
        self._mean = None
        self._cache = {}

    def fit(self, data: MeasuredData):
        if len(data) == 0:
            raise ValueError("cannot fit null model on empty data")
        self._mean = float(data.fitness_array().mean())
        self._epoch += 1
        self._cache = {}

    def predict(self, seq: Sequence) -> float:
        if self._mean is None:
            raise RuntimeError("model has no measured data; call fit() first")
        cached = self._cache.get(seq)
        if cached is not None:
            return cached
        rng = np.random.default_rng((self.seed, self._epoch) + seq.indices)
        if self._mean <= 0.0:
            eps = 0.0 if self.exp_param == "mean" else 1.0
        else:
            scale = self._mean if self.exp_param == "mean" else 1.0 / self._mean
            eps = min(float(rng.exponential(scale)), 1.0)
        self._cache[seq] = eps
        return eps


def _one_hot(matrix: np.ndarray, nsym: int) -> np.ndarray:
    n, length = matrix.shape
    out = np.zeros((n, length * nsym), dtype=np.float64)
    cols = np.arange(length) * nsym + matrix.astype(np.int64)
    out[np.arange(n)[:, None], cols] = 1.0
    return out


class RidgeModel(SurrogateModel):
    """Closed-form ridge regression on one-hot position x symbol features."""

    def __init__(self, l2=1e-6):
        if l2 <= 0:
            raise ValueError("l2 must be positive")
        self.l2 = float(l2)
        self._w = None
        self._ybar = 0.0
        self._nsym = None

    def fit(self, data: MeasuredData):
        if len(data) == 0:
            raise ValueError("cannot fit on empty data")
        self._nsym = data.sequences()[0].alphabet.size
        x = _one_hot(data.matrix(), self._nsym)
        y = data.fitness_array()
        self._ybar = float(y.mean())
        gram = x.T @ x + self.l2 * np.eye(x.shape[1])
        self._w = np.linalg.solve(gram, x.T @ (y - self._ybar))

    def predict(self, seq: Sequence) -> float:
        if self._w is None:
            raise RuntimeError("model has no measured data; call fit() first")
        feats = _one_hot(seq.to_array()[None, :], self._nsym)
        return float(self._ybar + feats[0] @ self._w)

    def predict_batch(self, seqs) -> np.ndarray:
        if self._w is None:
            raise RuntimeError("model has no measured data; call fit() first")
        mat = np.array([s.indices for s in seqs], dtype=np.int8)
        return self._ybar + _one_hot(mat, self._nsym) @ self._w


class KnnModel(SurrogateModel):
    """Distance-kernel regressor: weighted mean of the k nearest measured
    fitnesses with weights exp(-d / bandwidth). An exact (d = 0) match is
    returned verbatim."""

    def __init__(self, k=5, bandwidth=2.0):
        if k < 1:
            raise ValueError("k must be >= 1")
        if bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        self.k = int(k)
        self.bandwidth = float(bandwidth)
        self._matrix = None
        self._fits = None

    def fit(self, data: MeasuredData):
        if len(data) == 0:
            raise ValueError("cannot fit on empty data")
        self._matrix = data.matrix()
        self._fits = data.fitness_array()

    def predict(self, seq: Sequence) -> float:
        if self._matrix is None:
            raise RuntimeError("model has no measured data; call fit() first")
        d = (self._matrix != seq.to_array()).sum(axis=1)
        k = min(self.k, d.shape[0])
        order = np.argsort(d, kind="stable")[:k]
        dk = d[order].astype(np.float64)
        if dk[0] == 0.0:
            return float(self._fits[order[0]])
        # shift by the minimum distance so weights stay finite as bw -> 0
        w = np.exp(-(dk - dk[0]) / self.bandwidth)
        return float((w * self._fits[order]).sum() / w.sum())


class AdaptiveEnsemble(SurrogateModel):
    """Ensemble whose weights track member accuracy on the latest batch.

    In adaptive mode each refit first scores the members on the batch that
    was measured since the previous fit (an out-of-sample check), sets
    weights proportional to the clipped R^2 values, and only then refits
    the members on all data.
    """

    def __init__(self, members, weighting="adaptive"):
        if not members:
            raise ValueError("ensemble needs at least one member")
        if weighting not in ("uniform", "adaptive"):
            raise ValueError(f"unknown weighting {weighting!r}")
        self.members = list(members)
        self.weighting = weighting
        self.weights = np.full(len(members), 1.0 / len(members))
        self._fitted = False

    def reweight(self, batch):
        """Set weights proportional to max(R^2, 0) on (sequence, fitness)
        pairs; falls back to uniform when no member carries signal."""
        n = len(self.members)
        uniform = np.full(n, 1.0 / n)
        truths = np.array([f for _, f in batch], dtype=np.float64)
        if truths.shape[0] < 2 or np.all(truths == truths[0]):
            self.weights = uniform
            return
        seqs = [s for s, _ in batch]
        scores = np.empty(n)
        for i, m in enumerate(self.members):
            scores[i] = max(r2_score(m.predict_batch(seqs), truths), 0.0)
        total = scores.sum()
        self.weights = scores / total if total > 0 else uniform

    def fit(self, data: MeasuredData):
        if self.weighting == "adaptive" and self._fitted and data.batches:
            self.reweight(data.batches[-1])
        for m in self.members:
            m.fit(data)
        self._fitted = True

    def predict(self, seq: Sequence) -> float:
        return float(self.weights @ self.member_predictions(seq))

    def member_predictions(self, seq: Sequence) -> np.ndarray:
        return np.array([m.predict(seq) for m in self.members], dtype=np.float64)

    def uncertainty(self, seq: Sequence) -> float:
        preds = self.member_predictions(seq)
        mean = float(self.weights @ preds)
        return float(np.sqrt(self.weights @ (preds - mean) ** 2))

    def predict_with_uncertainty(self, seq: Sequence):
        preds = self.member_predictions(seq)
        mean = float(self.weights @ preds)
        sd = float(np.sqrt(self.weights @ (preds - mean) ** 2))
        return mean, sd


def fit_ridge(data: MeasuredData, l2: float = 1e-6) -> RidgeModel:
    model = RidgeModel(l2=l2)
    model.fit(data)
    return model


def fit_knn(data: MeasuredData, k: int = 5, bandwidth: float = 2.0) -> KnnModel:
    model = KnnModel(k=k, bandwidth=bandwidth)
    model.fit(data)
    return model


def r2_score(predictions, truths) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot."""
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(truths, dtype=np.float64)
    if p.shape != t.shape:
        raise ValueError("predictions and truths must have matching shapes")
    if t.shape[0] < 2:
        raise ValueError("need at least two samples")
    ss_tot = float(((t - t.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise ValueError("constant truths: R^2 undefined")
    ss_res = float(((p - t) ** 2).sum())
    return 1.0 - ss_res / ss_tot
