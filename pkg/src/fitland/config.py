"""Run-configuration schema: parsing, strict validation, and factories that
turn spec blocks into landscapes, models, and explorers.

Configs are JSON documents with a mandatory schema_version; unknown keys
anywhere are hard errors so hyperparameter typos cannot pass silently.
"""

import json
from dataclasses import dataclass, replace

from .errors import ConfigError
from .explorers import (
    AdaleadExplorer,
    BoEvoExplorer,
    CbasExplorer,
    CmaesExplorer,
    DbasExplorer,
    ExplorationBudget,
    WrightFisherExplorer,
)
from .landscapes import (
    ConstantLandscape,
    load_tf_landscape,
    make_rna_landscape,
    make_swampland,
    synth_tf_landscape,
)
from .seqs import DNA, RNA, Sequence
from .surrogates import (
    AdaptiveEnsemble,
    KnnModel,
    NoisyAbstractModel,
    NullModel,
    RidgeModel,
)

SCHEMA_VERSION = 1
DEFAULT_Y_TAU = (0.75, 0.9, 1.0)

_ALPHABETS = {"dna": DNA, "rna": RNA}


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}")


def _check_unknown(block, path, allowed):
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        _fail(path, f"unknown keys {unknown}")


def _get(block, path, key, kind, default=None, required=False):
    if key not in block:
        if required:
            _fail(f"{path}.{key}", "missing required key")
        return default
    value = block[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is not None:
        if isinstance(value, bool) and kind is not bool:
            _fail(f"{path}.{key}", f"expected {kind.__name__}, got bool")
        if not isinstance(value, kind):
            _fail(f"{path}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Validated experiment description; everything a run needs."""

    seed: int
    landscape: dict
    model: dict
    explorer: dict
    budget: ExplorationBudget
    start: dict
    y_tau: tuple = DEFAULT_Y_TAU
    replicates: tuple = ()
    sweep: dict | None = None

    def echo(self) -> dict:
        """Normalized config dictionary embedded in every output file."""
        doc = {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "landscape": dict(self.landscape),
            "model": dict(self.model),
            "explorer": dict(self.explorer),
            "budget": {
                "batch_size": self.budget.batch_size,
                "virtual_ratio": self.budget.virtual_ratio,
                "rounds": self.budget.rounds,
            },
            "start": dict(self.start),
            "y_tau": list(self.y_tau),
            "replicates": list(self.replicates),
        }
        if self.sweep is not None:
            doc["sweep"] = dict(self.sweep)
        return doc

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=int(seed))

    def with_alpha(self, alpha: float) -> "RunConfig":
        if self.model.get("type") != "abstract":
            raise ConfigError("alpha override requires the abstract model")
        model = dict(self.model)
        model["alpha"] = float(alpha)
        return replace(self, model=model)


_LANDSCAPE_KEYS = {
    "tf_table": {"type", "path"},
    "tf_synthetic": {"type", "seed", "length"},
    "rna": {"type", "seed", "length", "n_targets", "target_length"},
    "rna_swampland": {"type", "seed", "length", "n_targets", "target_length", "wildtype"},
    "constant": {"type", "length", "value", "alphabet"},
}


def validate_landscape_spec(spec, path="landscape") -> dict:
    kind = _get(spec, path, "type", str, required=True)
    if kind not in _LANDSCAPE_KEYS:
        _fail(f"{path}.type", f"unknown landscape type {kind!r}")
    _check_unknown(spec, path, _LANDSCAPE_KEYS[kind])
    out = {"type": kind}
    if kind == "tf_table":
        out["path"] = _get(spec, path, "path", str, required=True)
        return out
    if kind == "constant":
        out["length"] = _get(spec, path, "length", int, required=True)
        out["value"] = _get(spec, path, "value", float, default=0.5)
        out["alphabet"] = _get(spec, path, "alphabet", str, default="rna")
        if out["alphabet"] not in _ALPHABETS:
            _fail(f"{path}.alphabet", f"must be one of {sorted(_ALPHABETS)}")
        if not 0.0 <= out["value"] <= 1.0:
            _fail(f"{path}.value", "must be in [0, 1]")
        if out["length"] < 1:
            _fail(f"{path}.length", "must be >= 1")
        return out
    out["seed"] = _get(spec, path, "seed", int, required=True)
    out["length"] = _get(spec, path, "length", int, default=8 if kind == "tf_synthetic" else None)
    if out["length"] is None:
        _fail(f"{path}.length", "missing required key")
    if out["length"] < 1:
        _fail(f"{path}.length", "must be >= 1")
    if kind in ("rna", "rna_swampland"):
        default_targets = 1 if kind == "rna" else 2
        out["n_targets"] = _get(spec, path, "n_targets", int, default=default_targets)
        if out["n_targets"] not in (1, 2):
            _fail(f"{path}.n_targets", "must be 1 or 2")
        tl = _get(spec, path, "target_length", int, default=None)
        if tl is not None:
            if not 1 <= tl <= 100:
                _fail(f"{path}.target_length", "must be in [1, 100]")
            out["target_length"] = tl
        if kind == "rna_swampland":
            wt = _get(spec, path, "wildtype", str, default=None)
            if wt is not None:
                out["wildtype"] = wt
    return out


def build_landscape(spec):
    kind = spec["type"]
    if kind == "tf_table":
        return load_tf_landscape(spec["path"])
    if kind == "tf_synthetic":
        return synth_tf_landscape(spec["seed"], spec["length"])
    if kind == "constant":
        return ConstantLandscape(spec["length"], _ALPHABETS[spec["alphabet"]], spec["value"])
    if kind == "rna":
        return make_rna_landscape(
            spec["seed"], spec["length"], spec["n_targets"], spec.get("target_length")
        )
    if kind == "rna_swampland":
        wt = spec.get("wildtype")
        wildtype = Sequence.from_string(wt, RNA) if wt is not None else None
        return make_swampland(
            spec["seed"], spec["length"], spec["n_targets"], spec.get("target_length"), wildtype
        )
    raise ConfigError(f"unknown landscape type {kind!r}")


_MODEL_KEYS = {
    "abstract": {"type", "alpha", "seed", "noise_source", "exp_param"},
    "null": {"type", "seed", "exp_param"},
    "ridge": {"type", "l2"},
    "knn": {"type", "k", "bandwidth"},
    "ensemble": {"type", "members", "weighting"},
}


def validate_model_spec(spec, path="model", nested=False) -> dict:
    kind = _get(spec, path, "type", str, required=True)
    if kind not in _MODEL_KEYS:
        _fail(f"{path}.type", f"unknown model type {kind!r}")
    _check_unknown(spec, path, _MODEL_KEYS[kind])
    out = {"type": kind}
    if kind == "abstract":
        out["alpha"] = _get(spec, path, "alpha", float, required=True)
        if not 0.0 <= out["alpha"] <= 1.0:
            _fail(f"{path}.alpha", "must be in [0, 1]")
        seed = _get(spec, path, "seed", int, default=None)
        if seed is not None:
            out["seed"] = seed
        out["noise_source"] = _get(spec, path, "noise_source", str, default="nearest")
        out["exp_param"] = _get(spec, path, "exp_param", str, default="mean")
        if out["noise_source"] not in ("nearest", "empirical"):
            _fail(f"{path}.noise_source", "must be 'nearest' or 'empirical'")
        if out["exp_param"] not in ("mean", "rate"):
            _fail(f"{path}.exp_param", "must be 'mean' or 'rate'")
    elif kind == "null":
        seed = _get(spec, path, "seed", int, default=None)
        if seed is not None:
            out["seed"] = seed
        out["exp_param"] = _get(spec, path, "exp_param", str, default="mean")
        if out["exp_param"] not in ("mean", "rate"):
            _fail(f"{path}.exp_param", "must be 'mean' or 'rate'")
    elif kind == "ridge":
        out["l2"] = _get(spec, path, "l2", float, default=1e-6)
        if out["l2"] <= 0:
            _fail(f"{path}.l2", "must be positive")
    elif kind == "knn":
        out["k"] = _get(spec, path, "k", int, default=5)
        out["bandwidth"] = _get(spec, path, "bandwidth", float, default=2.0)
        if out["k"] < 1:
            _fail(f"{path}.k", "must be >= 1")
        if out["bandwidth"] <= 0:
            _fail(f"{path}.bandwidth", "must be positive")
    else:  # ensemble
        if nested:
            _fail(path, "ensembles cannot be nested")
        members = _get(spec, path, "members", list, required=True)
        if not members:
            _fail(f"{path}.members", "needs at least one member")
        out["members"] = [
            validate_model_spec(m, f"{path}.members[{i}]", nested=True)
            for i, m in enumerate(members)
        ]
        out["weighting"] = _get(spec, path, "weighting", str, default="adaptive")
        if out["weighting"] not in ("uniform", "adaptive"):
            _fail(f"{path}.weighting", "must be 'uniform' or 'adaptive'")
    return out


def build_model(spec, landscape, default_seed: int):
    kind = spec["type"]
    if kind == "abstract":
        return NoisyAbstractModel(
            landscape,
            alpha=spec["alpha"],
            seed=spec.get("seed", default_seed),
            noise_source=spec.get("noise_source", "nearest"),
            exp_param=spec.get("exp_param", "mean"),
        )
    if kind == "null":
        return NullModel(seed=spec.get("seed", default_seed), exp_param=spec.get("exp_param", "mean"))
    if kind == "ridge":
        return RidgeModel(l2=spec.get("l2", 1e-6))
    if kind == "knn":
        return KnnModel(k=spec.get("k", 5), bandwidth=spec.get("bandwidth", 2.0))
    if kind == "ensemble":
        members = [
            build_model(m, landscape, default_seed + i + 1)
            for i, m in enumerate(spec["members"])
        ]
        return AdaptiveEnsemble(members, weighting=spec.get("weighting", "adaptive"))
    raise ConfigError(f"unknown model type {kind!r}")


_EXPLORER_KEYS = {
    "adalead": {"type", "kappa", "recombination_rate", "mutation_rate", "rollout_branching", "seed"},
    "wf": {"type", "mutation_rate", "seed"},
    "wf_model_free": {"type", "mutation_rate", "seed"},
    "cmaes": {"type", "sigma0", "seed"},
    "bo_evo": {"type", "acquisition", "mutation_rate", "var_floor", "ucb_beta", "seed"},
    "dbas": {"type", "elite_frac", "pseudocount", "stall_limit", "sample_size", "seed"},
    "cbas": {"type", "elite_frac", "pseudocount", "stall_limit", "sample_size", "w_max", "seed"},
}


def validate_explorer_spec(spec, path="explorer") -> dict:
    kind = _get(spec, path, "type", str, required=True)
    if kind not in _EXPLORER_KEYS:
        _fail(f"{path}.type", f"unknown explorer type {kind!r}")
    _check_unknown(spec, path, _EXPLORER_KEYS[kind])
    out = {"type": kind}
    for key in _EXPLORER_KEYS[kind] - {"type"}:
        if key not in spec:
            continue
        kinds = {
            "kappa": float, "recombination_rate": float, "mutation_rate": float,
            "rollout_branching": int, "sigma0": float, "acquisition": str,
            "var_floor": float, "ucb_beta": float, "elite_frac": float,
            "pseudocount": float, "stall_limit": int, "sample_size": int,
            "w_max": float, "seed": int,
        }
        out[key] = _get(spec, path, key, kinds[key], required=True)
    try:
        build_explorer(out)  # constructor validation covers ranges
    except ValueError as exc:
        _fail(path, str(exc))
    return out


def build_explorer(spec):
    kind = spec["type"]
    kwargs = {k: v for k, v in spec.items() if k not in ("type", "seed")}
    if kind == "adalead":
        return AdaleadExplorer(**kwargs)
    if kind == "wf":
        return WrightFisherExplorer(model_free=False, **kwargs)
    if kind == "wf_model_free":
        return WrightFisherExplorer(model_free=True, **kwargs)
    if kind == "cmaes":
        return CmaesExplorer(**kwargs)
    if kind == "bo_evo":
        return BoEvoExplorer(**kwargs)
    if kind == "dbas":
        return DbasExplorer(**kwargs)
    if kind == "cbas":
        return CbasExplorer(**kwargs)
    raise ConfigError(f"unknown explorer type {kind!r}")


def _validate_start(spec, path="start") -> dict:
    _check_unknown(spec, path, {"sequences", "random"})
    has_seqs = "sequences" in spec
    has_random = "random" in spec
    if has_seqs == has_random:
        _fail(path, "provide exactly one of 'sequences' or 'random'")
    if has_seqs:
        seqs = _get(spec, path, "sequences", list, required=True)
        if not seqs or not all(isinstance(s, str) for s in seqs):
            _fail(f"{path}.sequences", "must be a non-empty list of strings")
        if len(set(seqs)) != len(seqs):
            _fail(f"{path}.sequences", "must be distinct")
        return {"sequences": list(seqs)}
    n = _get(spec, path, "random", int, required=True)
    if n < 1:
        _fail(f"{path}.random", "must be >= 1")
    return {"random": n}


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    allowed = {
        "schema_version", "seed", "landscape", "model", "explorer",
        "budget", "start", "y_tau", "replicates", "sweep",
    }
    _check_unknown(doc, "config", allowed)
    version = _get(doc, "config", "schema_version", int, required=True)
    if version != SCHEMA_VERSION:
        _fail("config.schema_version", f"expected {SCHEMA_VERSION}, got {version}")
    seed = _get(doc, "config", "seed", int, required=True)
    if seed < 0:
        _fail("config.seed", "must be nonnegative")

    for key in ("landscape", "model", "explorer", "budget", "start"):
        if key not in doc:
            _fail(f"config.{key}", "missing required key")
        if not isinstance(doc[key], dict):
            _fail(f"config.{key}", "must be an object")

    landscape = validate_landscape_spec(doc["landscape"])
    model = validate_model_spec(doc["model"])
    explorer = validate_explorer_spec(doc["explorer"])

    bpath = "budget"
    _check_unknown(doc["budget"], bpath, {"batch_size", "virtual_ratio", "rounds"})
    try:
        budget = ExplorationBudget(
            batch_size=_get(doc["budget"], bpath, "batch_size", int, required=True),
            virtual_ratio=_get(doc["budget"], bpath, "virtual_ratio", int, required=True),
            rounds=_get(doc["budget"], bpath, "rounds", int, required=True),
        )
    except ValueError as exc:
        _fail(bpath, str(exc))

    start = _validate_start(doc["start"])

    y_tau = doc.get("y_tau", list(DEFAULT_Y_TAU))
    if not isinstance(y_tau, list) or not y_tau or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in y_tau
    ):
        _fail("config.y_tau", "must be a non-empty list of numbers")

    replicates = doc.get("replicates", [seed])
    if not isinstance(replicates, list) or not replicates or not all(
        isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in replicates
    ):
        _fail("config.replicates", "must be a non-empty list of nonnegative ints")
    if len(set(replicates)) != len(replicates):
        _fail("config.replicates", "seeds must be distinct")

    sweep = doc.get("sweep")
    if sweep is not None:
        _check_unknown(sweep, "sweep", {"alphas", "optima_y_tau"})
        alphas = _get(sweep, "sweep", "alphas", list, required=True)
        if not alphas or not all(
            isinstance(a, (int, float)) and not isinstance(a, bool) and 0 <= a <= 1
            for a in alphas
        ):
            _fail("sweep.alphas", "must be a non-empty list of values in [0, 1]")
        norm = {"alphas": [float(a) for a in alphas]}
        oy = _get(sweep, "sweep", "optima_y_tau", float, default=None)
        if oy is not None:
            norm["optima_y_tau"] = oy
        sweep = norm

    return RunConfig(
        seed=seed,
        landscape=landscape,
        model=model,
        explorer=explorer,
        budget=budget,
        start=start,
        y_tau=tuple(float(v) for v in y_tau),
        replicates=tuple(int(v) for v in replicates),
        sweep=sweep,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(doc)
