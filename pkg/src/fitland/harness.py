"""Experiment orchestration: multi-round runs under budget enforcement,
metric computation, and accuracy sweeps over the abstract-model alpha.

A run measures a starting batch (round 0), then alternates model refits
and metered explorer proposals for T rounds. Everything is deterministic
given the config seed: reruns serialize byte-identically.
"""

import json
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, build_explorer, build_landscape, build_model
from .errors import ConfigError, ContractViolationError
from .explorers import MeteredModel
from .landscapes import LocalOptimaSet, enumerate_local_optima
from .seqs import DNA, RNA, Sequence
from .surrogates import MeasuredData

__all__ = [
    "RoundRecord",
    "RunLog",
    "run_experiment",
    "metric_cummax",
    "metric_count_above",
    "metric_max_hits",
    "metric_optima_found",
    "sweep_alpha",
]

RUNLOG_SCHEMA_VERSION = 1


@dataclass
class RoundRecord:
    """One round's proposals with ground-truth labels and query counts."""

    round: int
    sequences: list
    fitnesses: np.ndarray
    oracle_queries: int
    model_queries: int
    backfill: int
    wall_time: float = 0.0  # diagnostics only; kept out of the canonical JSON


@dataclass
class RunLog:
    """Config echo plus per-round records; metrics recompute from here."""

    config: dict
    landscape_name: str
    records: list

    def rounds(self) -> int:
        return len(self.records) - 1

    def measured_pairs(self):
        """Distinct measured (sequence, fitness) pairs in measurement order."""
        seen = {}
        for rec in self.records:
            for s, f in zip(rec.sequences, rec.fitnesses):
                seen.setdefault(s, float(f))
        return list(seen.items())

    def to_json_dict(self) -> dict:
        rounds = [
            {
                "round": rec.round,
                "sequences": [str(s) for s in rec.sequences],
                "fitness": [float(f) for f in rec.fitnesses],
                "oracle_queries": rec.oracle_queries,
                "model_queries": rec.model_queries,
                "backfill": rec.backfill,
            }
            for rec in self.records
        ]
        return {
            "schema_version": RUNLOG_SCHEMA_VERSION,
            "config": self.config,
            "landscape_name": self.landscape_name,
            "rounds": rounds,
            "totals": {
                "oracle_queries": sum(r.oracle_queries for r in self.records),
                "oracle_queries_after_round0": sum(
                    r.oracle_queries for r in self.records[1:]
                ),
                "model_queries": sum(r.model_queries for r in self.records),
            },
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @property
    def alphabet(self):
        kind = self.config["landscape"]["type"]
        if kind.startswith("tf"):
            return DNA
        if kind.startswith("rna"):
            return RNA
        if kind == "constant":
            from .config import _ALPHABETS

            return _ALPHABETS[self.config["landscape"]["alphabet"]]
        raise ValueError(f"unknown landscape type {kind!r}")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RunLog":
        log = cls(config=doc["config"], landscape_name=doc["landscape_name"], records=[])
        alphabet = log.alphabet
        for block in doc["rounds"]:
            log.records.append(
                RoundRecord(
                    round=block["round"],
                    sequences=[Sequence.from_string(s, alphabet) for s in block["sequences"]],
                    fitnesses=np.array(block["fitness"], dtype=np.float64),
                    oracle_queries=block["oracle_queries"],
                    model_queries=block["model_queries"],
                    backfill=block["backfill"],
                )
            )
        return log

    @classmethod
    def load(cls, path) -> "RunLog":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def _starting_sequences(config: RunConfig, landscape, rng) -> list:
    start = config.start
    if "sequences" in start:
        seqs = []
        for s in start["sequences"]:
            try:
                seq = Sequence.from_string(s, landscape.alphabet)
            except ValueError as exc:
                raise ConfigError(f"start.sequences: {exc}") from None
            if len(seq) != landscape.length:
                raise ConfigError(
                    f"start.sequences: {s!r} has length {len(seq)}, landscape needs {landscape.length}"
                )
            seqs.append(seq)
        return seqs
    n = start["random"]
    out = {}
    while len(out) < n:
        idx = rng.integers(0, landscape.alphabet.size, size=landscape.length)
        out.setdefault(Sequence(tuple(idx.tolist()), landscape.alphabet), None)
    return list(out)


def _fill_round0(starts: list, b: int, landscape, rng) -> list:
    """Starting sequences padded with random 1-2 substitution mutants."""
    if len(starts) > b:
        raise ConfigError(f"{len(starts)} starting sequences exceed batch size {b}")
    if landscape.domain_size < b:
        raise ConfigError("batch size exceeds landscape domain size")
    batch = list(starts)
    seen = set(batch)
    nsym = landscape.alphabet.size
    tries = 0
    while len(batch) < b and tries < 500 * b:
        tries += 1
        src = starts[int(rng.integers(len(starts)))]
        n_mut = int(rng.integers(1, 3))
        positions = rng.choice(landscape.length, size=min(n_mut, landscape.length), replace=False)
        idx = list(src.indices)
        for p in positions:
            idx[int(p)] = (idx[int(p)] + int(rng.integers(1, nsym))) % nsym
        cand = Sequence(tuple(idx), landscape.alphabet)
        if cand in seen:
            continue
        batch.append(cand)
        seen.add(cand)
    while len(batch) < b:  # tiny neighborhoods: top up uniformly at random
        idx = rng.integers(0, nsym, size=landscape.length)
        cand = Sequence(tuple(idx.tolist()), landscape.alphabet)
        if cand not in seen:
            batch.append(cand)
            seen.add(cand)
    return batch


def _validate_batch(batch, b: int, history, landscape, round_index: int):
    if len(batch) != b:
        raise ContractViolationError(
            f"round {round_index}: explorer returned {len(batch)} sequences, expected {b}"
        )
    if len(set(batch)) != len(batch):
        raise ContractViolationError(f"round {round_index}: duplicate proposals in batch")
    for s in batch:
        if s in history:
            raise ContractViolationError(
                f"round {round_index}: proposed already-measured sequence {s}"
            )
        landscape._check(s)


def run_experiment(config: RunConfig, landscape=None) -> RunLog:
    """Execute one seeded run and return its self-contained log.

    Round 0 measures the starting batch; rounds 1..T refit the model on
    all data, let the explorer propose B sequences under a fresh query
    meter, and label them with the ground-truth oracle.
    """
    if landscape is None:
        landscape = build_landscape(config.landscape)
    explorer = build_explorer(config.explorer)
    budget = config.budget

    root = np.random.SeedSequence(config.seed)
    ss_start, ss_explorer, ss_model = root.spawn(3)
    rng_start = np.random.default_rng(ss_start)
    explorer_seed = config.explorer.get("seed")
    rng_explorer = (
        np.random.default_rng(explorer_seed)
        if explorer_seed is not None
        else np.random.default_rng(ss_explorer)
    )
    model_default_seed = int(ss_model.generate_state(1)[0])
    model = build_model(config.model, landscape, model_default_seed)

    t0 = time.perf_counter()
    starts = _starting_sequences(config, landscape, rng_start)
    round0 = _fill_round0(starts, budget.batch_size, landscape, rng_start)
    fits0 = landscape.evaluate_batch(round0)
    history = MeasuredData()
    history.add_batch(list(zip(round0, fits0)))
    records = [
        RoundRecord(
            round=0,
            sequences=round0,
            fitnesses=fits0,
            oracle_queries=len(round0),
            model_queries=0,
            backfill=0,
            wall_time=time.perf_counter() - t0,
        )
    ]

    for t in range(1, budget.rounds + 1):
        t0 = time.perf_counter()
        model.fit(history)
        meter = MeteredModel(model, budget.model_cap)
        batch = explorer.propose_batch(meter, history, budget, rng_explorer)
        _validate_batch(batch, budget.batch_size, history, landscape, t)
        fits = landscape.evaluate_batch(batch)
        history.add_batch(list(zip(batch, fits)))
        records.append(
            RoundRecord(
                round=t,
                sequences=batch,
                fitnesses=fits,
                oracle_queries=len(batch),
                model_queries=meter.count,
                backfill=int(explorer.last_stats.get("backfill", 0)),
                wall_time=time.perf_counter() - t0,
            )
        )
    return RunLog(config=config.echo(), landscape_name=landscape.name, records=records)


def metric_cummax(log: RunLog) -> np.ndarray:
    """Running maximum of true fitness over all measured sequences."""
    out = np.empty(len(log.records))
    best = -np.inf
    for i, rec in enumerate(log.records):
        if rec.fitnesses.size:
            best = max(best, float(rec.fitnesses.max()))
        out[i] = best
    return out


def metric_count_above(log: RunLog, y_tau: float) -> int:
    """Distinct measured sequences with fitness strictly above y_tau."""
    return sum(f > y_tau for _, f in log.measured_pairs())


def metric_max_hits(log: RunLog, tol: float = 1e-9) -> int:
    """Distinct measured sequences at the top of the scale (>= 1 - tol);
    the practical reading of a threshold of exactly 1 on normalized
    landscapes."""
    return sum(f >= 1.0 - tol for _, f in log.measured_pairs())


def metric_count_above_series(log: RunLog, y_tau: float) -> np.ndarray:
    seen = set()
    out = np.empty(len(log.records), dtype=np.int64)
    count = 0
    for i, rec in enumerate(log.records):
        for s, f in zip(rec.sequences, rec.fitnesses):
            if s not in seen:
                seen.add(s)
                if f > y_tau:
                    count += 1
        out[i] = count
    return out


def metric_optima_found(log: RunLog, optima: LocalOptimaSet) -> int:
    """How many known local optima appear among the measured sequences."""
    found = set()
    for rec in log.records:
        for s in rec.sequences:
            if s in optima:
                found.add(s)
    return len(found)


def _sweep_cell(args):
    config, alpha, seed = args
    cfg = config.with_alpha(alpha).with_seed(seed)
    return run_experiment(cfg)


def sweep_alpha(config: RunConfig, alphas=None, jobs: int = 1, landscape=None):
    """Run the experiment grid (alpha x replicate seed) and tabulate
    final cummax, optima found (when requested and enumerable), and the
    count of measured sequences above each threshold."""
    if config.model.get("type") != "abstract":
        raise ConfigError("sweep requires model.type == 'abstract'")
    if alphas is None:
        if not config.sweep:
            raise ConfigError("no alphas given and no sweep block in config")
        alphas = config.sweep["alphas"]
    alphas = [float(a) for a in alphas]
    if landscape is None:
        landscape = build_landscape(config.landscape)

    optima = None
    if config.sweep and "optima_y_tau" in config.sweep:
        optima = enumerate_local_optima(landscape, config.sweep["optima_y_tau"])

    cells = [(alpha, seed) for alpha in alphas for seed in config.replicates]
    if jobs > 1:
        # spawn context: forking is unsafe once the numba threading layer is up
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            logs = list(pool.map(_sweep_cell, [(config, a, s) for a, s in cells]))
    else:
        logs = [
            run_experiment(config.with_alpha(a).with_seed(s), landscape=landscape)
            for a, s in cells
        ]

    rows = []
    for (alpha, seed), log in zip(cells, logs):
        row = {
            "alpha": alpha,
            "seed": seed,
            "final_cummax": float(metric_cummax(log)[-1]),
            "optima_found": metric_optima_found(log, optima) if optima is not None else "",
        }
        for y in config.y_tau:
            key = f"count_above_{y:g}"
            row[key] = metric_max_hits(log) if y == 1.0 else metric_count_above(log, y)
        rows.append(row)
    return rows
