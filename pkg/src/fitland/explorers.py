"""Batch-proposal algorithms operating under strict query budgets.

Each explorer proposes a batch of distinct, not-yet-measured sequences
using only the measured history and a metered surrogate model; it never
touches landscape internals. Ground-truth labels per round are limited to
the batch size B, surrogate queries to v * B (enforced by MeteredModel).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, ContractViolationError
from .seqs import Sequence, mutate, random_sequence, recombine
from .surrogates import MeasuredData

__all__ = [
    "ExplorationBudget",
    "MeteredModel",
    "Explorer",
    "AdaleadExplorer",
    "WrightFisherExplorer",
    "CmaesExplorer",
    "BoEvoExplorer",
    "DbasExplorer",
    "CbasExplorer",
    "PwmGenerator",
    "adalead_seeds",
    "rollout",
    "fit_pwm",
    "cbas_weights",
    "acquisition_ei",
    "acquisition_ucb",
]


@dataclass(frozen=True)
class ExplorationBudget:
    """Per-round query allowances: B oracle labels, v*B surrogate calls."""

    batch_size: int
    virtual_ratio: int
    rounds: int

    def __post_init__(self):
        for name in ("batch_size", "virtual_ratio", "rounds"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def model_cap(self) -> int:
        return self.batch_size * self.virtual_ratio


class MeteredModel:
    """Counts every surrogate query and refuses to exceed the cap."""

    def __init__(self, model, cap: int):
        self._model = model
        self.cap = int(cap)
        self.count = 0

    @property
    def remaining(self) -> int:
        return self.cap - self.count

    def _charge(self, n: int = 1):
        if self.count + n > self.cap:
            raise BudgetExceededError(
                f"surrogate query cap exceeded ({self.count} + {n} > {self.cap})"
            )
        self.count += n

    def predict(self, seq) -> float:
        self._charge()
        return self._model.predict(seq)

    def predict_batch(self, seqs) -> np.ndarray:
        self._charge(len(seqs))
        return self._model.predict_batch(seqs)

    def predict_with_uncertainty(self, seq):
        self._charge()
        return self._model.predict(seq), self._model.uncertainty(seq)

    def member_predictions(self, seq) -> np.ndarray:
        self._charge()
        return self._model.member_predictions(seq)


class Explorer:
    """Interface: propose the next batch from history and a metered model."""

    name = "explorer"

    def __init__(self):
        self.last_stats = {}

    def propose_batch(self, model: MeteredModel, history: MeasuredData,
                      budget: ExplorationBudget, rng: np.random.Generator):
        raise NotImplementedError


def _select_batch(pool: dict, b: int, history: MeasuredData):
    """Top-b pool entries by score, measured sequences excluded; ties are
    broken by canonical sequence order for reproducibility."""
    items = [(s, sc) for s, sc in pool.items() if s not in history]
    items.sort(key=lambda t: (-t[1], t[0].indices))
    return [s for s, _ in items[:b]]


def _backfill(batch: list, b: int, sources: list, mu: float,
              history: MeasuredData, rng: np.random.Generator) -> int:
    """Pad a short batch with fresh unmeasured mutants of the sources."""
    if not sources:
        raise ContractViolationError("backfill needs at least one source sequence")
    seen = set(batch)
    added = 0
    tries = 0
    max_tries = 200 * max(b, 1)
    while len(batch) < b and tries < max_tries:
        tries += 1
        src = sources[int(rng.integers(len(sources)))]
        cand = mutate(src, mu, rng)
        if cand in history or cand in seen:
            continue
        batch.append(cand)
        seen.add(cand)
        added += 1
    # nearly exhausted neighborhoods: fall back to uniform random sequences
    alphabet = sources[0].alphabet
    length = len(sources[0])
    while len(batch) < b and tries < 2 * max_tries:
        tries += 1
        cand = random_sequence(length, alphabet, rng)
        if cand in history or cand in seen:
            continue
        batch.append(cand)
        seen.add(cand)
        added += 1
    if len(batch) < b:
        raise ContractViolationError(
            f"could not assemble {b} distinct unmeasured sequences"
        )
    return added


# ---------------------------------------------------------------------------
# Adaptive greedy evolutionary explorer
# ---------------------------------------------------------------------------


def adalead_seeds(batch, kappa: float):
    """Members of a measured batch within (1 - kappa) of the batch maximum.

    On a flat batch everything clears the filter, which is what adapts the
    greediness: prominent peaks shrink the seed set, plateaus widen it.
    """
    batch = list(batch)
    if not batch:
        raise ValueError("empty batch")
    top = max(f for _, f in batch)
    threshold = (1.0 - kappa) * top
    return [(s, f) for s, f in batch if f >= threshold]


def rollout(parent: Sequence, model: MeteredModel, mu: float,
            rng: np.random.Generator, score_cache: dict | None = None):
    """Mutation chain from a parent, scored by the surrogate.

    Children are generated one substitution round at a time and the chain
    stops as soon as a child scores below the parent's own score (that
    terminating child is still returned) or the meter runs dry. Scores are
    memoized in score_cache so repeated sequences are not re-charged.
    """
    cache = {} if score_cache is None else score_cache
    out = []
    s0 = cache.get(parent)
    if s0 is None:
        if model.remaining <= 0:
            return out
        s0 = model.predict(parent)
        cache[parent] = s0
    cur = parent
    stale = 0
    while model.remaining > 0:
        child = mutate(cur, mu, rng)
        score = cache.get(child)
        if score is None:
            score = model.predict(child)
            cache[child] = score
            stale = 0
        else:
            stale += 1
            if stale > 1000:  # liveness guard for near-exhausted tiny domains
                break
        out.append((child, score))
        if score < s0:
            break
        cur = child
    return out


class AdaleadExplorer(Explorer):
    """Greedy evolutionary search seeded from the best recent measurements.

    Each round: take every batch member within (1 - kappa) of the batch
    maximum as seeds, recombine random seed pairs into parents, and grow
    mutation chains from each parent while the surrogate keeps scoring the
    chain at or above its start. The candidate pool is ranked by surrogate
    score and the top B unmeasured sequences become the next batch.
    """

    name = "adalead"

    def __init__(self, kappa: float = 0.05, recombination_rate: float = 0.2,
                 mutation_rate: float | None = None, rollout_branching: int = 1):
        super().__init__()
        if not 0.0 <= kappa < 1.0:
            raise ValueError("kappa must be in [0, 1)")
        if not 0.0 <= recombination_rate <= 1.0:
            raise ValueError("recombination rate must be in [0, 1]")
        if mutation_rate is not None and not 0.0 < mutation_rate <= 1.0:
            raise ValueError("mutation rate must be in (0, 1]")
        if rollout_branching < 1:
            raise ValueError("rollout branching must be >= 1")
        self.kappa = kappa
        self.recombination_rate = recombination_rate
        self.mutation_rate = mutation_rate
        self.rollout_branching = rollout_branching

    def _recombine_seeds(self, seeds: list, rng: np.random.Generator) -> list:
        # ceil(|S| / 2) random disjoint pairs; both offspring kept, an odd
        # leftover passes through unchanged
        if len(seeds) == 1:
            return [seeds[0]]
        perm = rng.permutation(len(seeds))
        out = []
        for i in range(0, len(perm) - 1, 2):
            a, b = seeds[perm[i]], seeds[perm[i + 1]]
            c1, c2 = recombine(a, b, self.recombination_rate, rng)
            out.append(c1)
            out.append(c2)
        if len(perm) % 2 == 1:
            out.append(seeds[perm[-1]])
        return out

    def propose_batch(self, model, history, budget, rng):
        seeds = adalead_seeds(history.last_batch, self.kappa)
        seed_seqs = [s for s, _ in seeds]
        length = len(seed_seqs[0])
        mu = self.mutation_rate if self.mutation_rate is not None else 1.0 / length
        cap = budget.model_cap
        cache = {}
        pool = {}
        parents = []
        while model.remaining > 0 and len(pool) < cap:
            queries_before = model.count
            pool_before = len(pool)
            parents.extend(self._recombine_seeds(seed_seqs, rng))
            for parent in parents:
                if model.remaining <= 0 or len(pool) >= cap:
                    break
                for _ in range(self.rollout_branching):
                    for child, score in rollout(parent, model, mu, rng, cache):
                        pool.setdefault(child, score)
            if model.count == queries_before and len(pool) == pool_before:
                break  # reachable domain exhausted; more passes cannot progress
        batch = _select_batch(pool, budget.batch_size, history)
        filled = _backfill(batch, budget.batch_size, seed_seqs, mu, history, rng)
        self.last_stats = {
            "seed_count": len(seeds),
            "pool_size": len(pool),
            "backfill": filled,
        }
        return batch


# ---------------------------------------------------------------------------
# Wright-Fisher processes
# ---------------------------------------------------------------------------


class WrightFisherExplorer(Explorer):
    """Fitness-proportional resampling plus mutation.

    The model-free variant performs one generation from the measured batch
    using measured fitness only (zero surrogate queries). The model-guided
    variant evolves the population for up to v in-silico generations,
    scoring each generation's children with the surrogate.
    """

    def __init__(self, model_free: bool = False, mutation_rate: float | None = None):
        super().__init__()
        if mutation_rate is not None and not 0.0 <= mutation_rate <= 1.0:
            raise ValueError("mutation rate must be in [0, 1]")
        self.model_free = model_free
        self.mutation_rate = mutation_rate

    @property
    def name(self):
        return "wf_model_free" if self.model_free else "wf"

    @staticmethod
    def _selection_probs(fits: np.ndarray) -> np.ndarray:
        fits = np.clip(fits, 0.0, None)
        total = fits.sum()
        if total <= 0.0:
            return np.full(fits.shape[0], 1.0 / fits.shape[0])
        return fits / total

    def propose_batch(self, model, history, budget, rng):
        pop = list(history.last_batch)
        length = len(pop[0][0])
        mu = self.mutation_rate if self.mutation_rate is not None else 1.0 / length
        b = budget.batch_size
        backfill_mu = mu if mu > 0 else 1.0 / length

        if self.model_free:
            batch = []
            seen = set()
            probs = self._selection_probs(np.array([f for _, f in pop]))
            tries = 0
            while mu > 0 and len(batch) < b and tries < 200 * b:
                tries += 1
                parent = pop[int(rng.choice(len(pop), p=probs))][0]
                child = mutate(parent, mu, rng)
                if child in history or child in seen:
                    continue
                batch.append(child)
                seen.add(child)
            filled = _backfill(batch, b, [s for s, _ in pop], backfill_mu, history, rng)
            self.last_stats = {"generations": 1, "backfill": filled}
            return batch

        cache = {}
        cur_seqs = [s for s, _ in pop]
        cur_scores = np.array([f for _, f in pop])
        generations = 0
        while model.remaining > 0:
            probs = self._selection_probs(cur_scores)
            idx = rng.choice(len(cur_seqs), size=b, p=probs)
            children = [mutate(cur_seqs[int(i)], mu, rng) for i in idx]
            scores = np.empty(b)
            exhausted = False
            for i, c in enumerate(children):
                sc = cache.get(c)
                if sc is None:
                    if model.remaining <= 0:
                        children = children[:i]
                        scores = scores[:i]
                        exhausted = True
                        break
                    sc = model.predict(c)
                    cache[c] = sc
                scores[i] = sc
            if len(children) == 0:
                break
            cur_seqs, cur_scores = children, scores
            generations += 1
            if exhausted or generations >= budget.virtual_ratio:
                break
        pool = {}
        for s, sc in zip(cur_seqs, cur_scores):
            pool.setdefault(s, float(sc))
        batch = _select_batch(pool, b, history)
        filled = _backfill(batch, b, cur_seqs, backfill_mu, history, rng)
        self.last_stats = {"generations": generations, "backfill": filled}
        return batch


# ---------------------------------------------------------------------------
# Covariance-adaptation search over relaxed one-hot space
# ---------------------------------------------------------------------------


class CmaesExplorer(Explorer):
    """Evolution strategy sampling continuous vectors of dimension A*L and
    decoding them to sequences by per-position argmax.

    Rank-weighted mean/covariance updates follow the standard tutorial
    constants, with the mean renormalized to unit length after every update
    to keep the decoded distribution from exploding.
    """

    name = "cmaes"

    def __init__(self, sigma0: float = 1.0, eig_floor: float = 1e-8):
        super().__init__()
        if sigma0 <= 0:
            raise ValueError("sigma0 must be positive")
        self.sigma0 = sigma0
        self.eig_floor = eig_floor
        self.mean = None
        self.cov = None
        self.sigma = None
        self.p_sigma = None
        self.p_c = None
        self.iteration = 0
        self._dim = None
        self._length = None
        self._nsym = None
        self._alphabet = None

    def _init_state(self, length: int, alphabet, rng):
        self._length = length
        self._nsym = alphabet.size
        self._alphabet = alphabet
        self._dim = length * alphabet.size
        v = rng.standard_normal(self._dim)
        self.mean = v / np.linalg.norm(v)
        self.cov = np.eye(self._dim)
        self.sigma = self.sigma0
        self.p_sigma = np.zeros(self._dim)
        self.p_c = np.zeros(self._dim)
        self.iteration = 0

    def _decode(self, row: np.ndarray) -> Sequence:
        blocks = row.reshape(self._length, self._nsym)
        return Sequence(tuple(int(i) for i in blocks.argmax(axis=1)), self._alphabet)

    def _update(self, xs: np.ndarray, scores: np.ndarray):
        n = self._dim
        order = np.lexsort((np.arange(scores.shape[0]), -scores))
        mu_sel = max(1, scores.shape[0] // 4)
        sel = xs[order[:mu_sel]]
        raw = np.log(mu_sel + 0.5) - np.log(np.arange(1, mu_sel + 1))
        w = raw / raw.sum()
        mu_eff = 1.0 / (w**2).sum()

        c_sigma = (mu_eff + 2) / (n + mu_eff + 5)
        d_sigma = 1 + 2 * max(0.0, math.sqrt((mu_eff - 1) / (n + 1)) - 1) + c_sigma
        c_c = (4 + mu_eff / n) / (n + 4 + 2 * mu_eff / n)
        c_1 = 2 / ((n + 1.3) ** 2 + mu_eff)
        c_mu = min(1 - c_1, 2 * (mu_eff - 2 + 1 / mu_eff) / ((n + 2) ** 2 + mu_eff))
        chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

        ys = (sel - self.mean) / self.sigma
        y_w = w @ ys
        m_new = self.mean + self.sigma * y_w

        vals, vecs = np.linalg.eigh(self.cov)
        vals = np.maximum(vals, self.eig_floor)
        inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.T
        self.p_sigma = (1 - c_sigma) * self.p_sigma + math.sqrt(
            c_sigma * (2 - c_sigma) * mu_eff
        ) * (inv_sqrt @ y_w)
        self.iteration += 1
        self.sigma *= math.exp(
            (c_sigma / d_sigma) * (np.linalg.norm(self.p_sigma) / chi_n - 1)
        )
        self.sigma = float(min(max(self.sigma, 1e-8), 1e8))

        denom = math.sqrt(1 - (1 - c_sigma) ** (2 * self.iteration))
        h_sigma = float(
            np.linalg.norm(self.p_sigma) / denom < (1.4 + 2 / (n + 1)) * chi_n
        )
        self.p_c = (1 - c_c) * self.p_c + h_sigma * math.sqrt(
            c_c * (2 - c_c) * mu_eff
        ) * y_w
        delta_h = (1 - h_sigma) * c_c * (2 - c_c)
        rank_mu = (ys * w[:, None]).T @ ys
        self.cov = (
            (1 - c_1 - c_mu) * self.cov
            + c_1 * (np.outer(self.p_c, self.p_c) + delta_h * self.cov)
            + c_mu * rank_mu
        )
        self.cov = (self.cov + self.cov.T) / 2.0
        vals, vecs = np.linalg.eigh(self.cov)
        if vals.min() < self.eig_floor:
            self.cov += (self.eig_floor - vals.min()) * np.eye(n)
        self.mean = m_new / np.linalg.norm(m_new)

    def propose_batch(self, model, history, budget, rng):
        first = history.last_batch[0][0]
        if self.mean is None:
            self._init_state(len(first), first.alphabet, rng)
        n_samples = budget.model_cap
        vals, vecs = np.linalg.eigh(self.cov)
        vals = np.maximum(vals, self.eig_floor)
        transform = vecs * np.sqrt(vals)
        z = rng.standard_normal((n_samples, self._dim))
        xs = self.mean + self.sigma * (z @ transform.T)

        decoded = [self._decode(row) for row in xs]
        unique = {}
        for s in decoded:
            unique.setdefault(s, None)
        unique_list = list(unique)[: model.remaining]
        scores = model.predict_batch(unique_list) if unique_list else np.empty(0)
        score_of = dict(zip(unique_list, scores))

        keep = [i for i, s in enumerate(decoded) if s in score_of]
        if keep:
            row_scores = np.array([score_of[decoded[i]] for i in keep])
            self._update(xs[keep], row_scores)

        pool = {s: float(sc) for s, sc in score_of.items()}
        batch = _select_batch(pool, budget.batch_size, history)
        sources = batch if batch else [first]
        filled = _backfill(
            batch, budget.batch_size, sources, 1.0 / self._length, history, rng
        )
        self.last_stats = {"unique_decoded": len(unique), "backfill": filled}
        return batch


# ---------------------------------------------------------------------------
# Evolutionary Bayesian optimization
# ---------------------------------------------------------------------------


def _norm_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


def _norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def acquisition_ei(mean: float, sd: float, best_so_far: float) -> float:
    """Expected improvement over the incumbent for a Gaussian belief."""
    if sd < 0:
        raise ValueError("sd must be nonnegative")
    improvement = mean - best_so_far
    if sd == 0.0:
        return max(improvement, 0.0)
    z = improvement / sd
    return improvement * _norm_cdf(z) + sd * _norm_pdf(z)


def acquisition_ucb(mean: float, sd: float, beta: float = 2.0) -> float:
    if sd < 0:
        raise ValueError("sd must be nonnegative")
    return mean + beta * sd


class BoEvoExplorer(Explorer):
    """Mutation-chain search guided by an acquisition function over the
    per-member spread of an ensemble surrogate.

    Chains start from the previous batch's best sequence by predicted
    score; a chain extends while the acquisition improves and the member
    variance stays within twice the chain-start variance. The batch is
    picked from the candidate pool by Thompson sampling (one member drawn
    per candidate).
    """

    name = "bo_evo"

    def __init__(self, acquisition: str = "ei", mutation_rate: float | None = None,
                 var_floor: float = 1e-6, ucb_beta: float = 2.0):
        super().__init__()
        if acquisition not in ("ei", "ucb"):
            raise ValueError(f"unknown acquisition {acquisition!r}")
        if var_floor <= 0:
            raise ValueError("var_floor must be positive")
        self.acquisition = acquisition
        self.mutation_rate = mutation_rate
        self.var_floor = var_floor
        self.ucb_beta = ucb_beta

    def _acq(self, mean: float, sd: float, best: float) -> float:
        if self.acquisition == "ucb":
            return acquisition_ucb(mean, sd, self.ucb_beta)
        return acquisition_ei(mean, sd, best)

    def propose_batch(self, model, history, budget, rng):
        last = list(history.last_batch)
        length = len(last[0][0])
        mu = self.mutation_rate if self.mutation_rate is not None else 1.0 / length
        best_measured = max(f for _, f in history.pairs())

        info = {}

        def query(seq):
            cached = info.get(seq)
            if cached is not None:
                return cached
            preds = model.member_predictions(seq)
            mean = float(preds.mean())
            sd = float(preds.std())
            info[seq] = (mean, sd, preds)
            return info[seq]

        # state sequence: previous batch's best by predicted score
        state, state_score = None, -np.inf
        for s, f in last:
            if model.remaining <= 0:
                break
            mean, _, _ = query(s)
            if mean > state_score or (mean == state_score and s.indices < state.indices):
                state, state_score = s, mean
        if state is None:  # meter too small to score the batch: fall back
            state = max(last, key=lambda t: (t[1], t[0].indices))[0]

        chain_count = 0
        stall = 0
        while model.remaining > 0 and stall < 200:
            before = model.count
            x = mutate(state, mu, rng)
            mean, sd, _ = query(x)
            var0 = sd * sd
            var_limit = 2.0 * var0 if var0 > 0 else self.var_floor
            prev_acq = self._acq(mean, sd, best_measured)
            while model.remaining > 0:
                child = mutate(x, mu, rng)
                c_mean, c_sd, _ = query(child)
                if c_sd * c_sd > var_limit:
                    break
                a = self._acq(c_mean, c_sd, best_measured)
                if a <= prev_acq:
                    break
                x, prev_acq = child, a
            chain_count += 1
            stall = stall + 1 if model.count == before else 0

        # Thompson sampling: one member draw per candidate, top B draws win
        pool = {}
        for s, (_, _, preds) in info.items():
            if s in history:
                continue
            pool[s] = float(preds[int(rng.integers(preds.shape[0]))])
        batch = _select_batch(pool, budget.batch_size, history)
        sources = batch if batch else [state]
        filled = _backfill(batch, budget.batch_size, sources, mu, history, rng)
        self.last_stats = {"chains": chain_count, "backfill": filled}
        return batch


# ---------------------------------------------------------------------------
# Cross-entropy samplers with a position-weight-matrix generator
# ---------------------------------------------------------------------------


class PwmGenerator:
    """Independent per-position categorical distribution over symbols."""

    def __init__(self, probs: np.ndarray, alphabet):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[1] != alphabet.size:
            raise ValueError("probs must have shape (length, alphabet size)")
        if (probs < 0).any():
            raise ValueError("probabilities must be nonnegative")
        rows = probs.sum(axis=1)
        if not np.allclose(rows, 1.0):
            raise ValueError("each position's probabilities must sum to 1")
        self.probs = probs
        self.alphabet = alphabet
        self._cum = np.cumsum(probs, axis=1)
        with np.errstate(divide="ignore"):
            self._log = np.log(probs)

    @property
    def length(self) -> int:
        return self.probs.shape[0]

    def sample(self, rng: np.random.Generator) -> Sequence:
        u = rng.random(self.length)
        idx = (u[:, None] >= self._cum).sum(axis=1)
        idx = np.minimum(idx, self.alphabet.size - 1)
        return Sequence(tuple(int(i) for i in idx), self.alphabet)

    def log_prob(self, seq: Sequence) -> float:
        return float(self._log[np.arange(self.length), list(seq.indices)].sum())


def fit_pwm(samples, weights=None, pseudocount: float = 0.1) -> PwmGenerator:
    """Weighted per-position symbol frequencies with additive smoothing."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    if pseudocount < 0:
        raise ValueError("pseudocount must be nonnegative")
    alphabet = samples[0].alphabet
    length = len(samples[0])
    if weights is None:
        weights = np.ones(len(samples))
    weights = np.asarray(weights, dtype=np.float64)
    if (weights < 0).any():
        raise ValueError("weights must be nonnegative")
    total = weights.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    counts = np.zeros((length, alphabet.size))
    pos = np.arange(length)
    for s, w in zip(samples, weights):
        counts[pos, list(s.indices)] += w
    probs = (counts + pseudocount) / (total + alphabet.size * pseudocount)
    return PwmGenerator(probs, alphabet)


def cbas_weights(samples, g0: PwmGenerator, gt: PwmGenerator, w_max: float = 10.0) -> np.ndarray:
    """Likelihood ratio of the original generator to the current one,
    computed in log space and clipped to [0, w_max]."""
    if g0.length != gt.length or g0.alphabet != gt.alphabet:
        raise ValueError("generators must share length and alphabet")
    log_ratio = np.array([g0.log_prob(s) - gt.log_prob(s) for s in samples])
    with np.errstate(over="ignore"):
        w = np.exp(log_ratio)
    return np.clip(w, 0.0, w_max)


class DbasExplorer(Explorer):
    """Cross-entropy adaptive sampling with a PWM generator.

    Inner loop per round: sample candidates from the generator, keep those
    above the stricter of the current top-20% cut and the running
    threshold, refit the generator on the elites, and stop when the meter
    is spent or the best score has stalled for `stall_limit` iterations.
    """

    name = "dbas"

    def __init__(self, elite_frac: float = 0.2, pseudocount: float = 0.1,
                 stall_limit: int = 10, sample_size: int | None = None):
        super().__init__()
        if not 0.0 < elite_frac < 1.0:
            raise ValueError("elite fraction must be in (0, 1)")
        if pseudocount <= 0:
            raise ValueError("pseudocount must be positive")
        if stall_limit < 1:
            raise ValueError("stall limit must be >= 1")
        self.elite_frac = elite_frac
        self.pseudocount = pseudocount
        self.stall_limit = stall_limit
        self.sample_size = sample_size
        self.reweight_elites = False  # CbAS subclass flips this
        self.w_max = 10.0

    def _history_elite(self, history: MeasuredData, minimum: int) -> list:
        ranked = sorted(history.pairs(), key=lambda t: (-t[1], t[0].indices))
        n = max(minimum, math.ceil(self.elite_frac * len(ranked)))
        return [s for s, _ in ranked[:n]]

    def propose_batch(self, model, history, budget, rng):
        b = budget.batch_size
        n_sample = self.sample_size or b
        elite = self._history_elite(history, minimum=2)
        generator = fit_pwm(elite, pseudocount=self.pseudocount)
        g0 = generator if self.reweight_elites else None

        pool = {}
        threshold = -np.inf
        best = -np.inf
        stall = 0
        thresholds = []
        iterations = 0
        while model.remaining > 0 and stall < self.stall_limit:
            iterations += 1
            draws = [generator.sample(rng) for _ in range(n_sample)]
            cands = []
            scores = []
            for s in draws:
                sc = pool.get(s)
                if sc is None:
                    if model.remaining <= 0:
                        break
                    sc = model.predict(s)
                    pool[s] = sc
                cands.append(s)
                scores.append(sc)
            if not cands:
                break
            scores = np.array(scores)
            threshold = max(threshold, float(np.quantile(scores, 1.0 - self.elite_frac)))
            thresholds.append(threshold)
            elite = [s for s, sc in zip(cands, scores) if sc >= threshold]
            if len(set(elite)) < 2:
                elite = self._history_elite(history, minimum=max(2, b))
                generator = fit_pwm(elite, pseudocount=self.pseudocount)
            else:
                weights = None
                if self.reweight_elites:
                    weights = cbas_weights(elite, g0, generator, self.w_max)
                    if weights.sum() <= 0:
                        weights = None
                generator = fit_pwm(elite, weights, pseudocount=self.pseudocount)
            top = float(scores.max())
            if top > best:
                best = top
                stall = 0
            else:
                stall += 1
        batch = _select_batch(pool, b, history)
        sources = batch if batch else self._history_elite(history, minimum=2)
        length = len(sources[0])
        filled = _backfill(batch, b, sources, 1.0 / length, history, rng)
        self.last_stats = {
            "inner_iterations": iterations,
            "inner_thresholds": thresholds,
            "backfill": filled,
        }
        return batch


class CbasExplorer(DbasExplorer):
    """DbAS variant that discounts elite samples by the likelihood ratio of
    the round's original generator to the current one before refitting."""

    name = "cbas"

    def __init__(self, elite_frac: float = 0.2, pseudocount: float = 0.1,
                 stall_limit: int = 10, sample_size: int | None = None,
                 w_max: float = 10.0):
        super().__init__(elite_frac, pseudocount, stall_limit, sample_size)
        self.w_max = w_max
        self.reweight_elites = True
