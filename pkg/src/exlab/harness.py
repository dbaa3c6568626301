"""
Experiment runner: exhaustive and sampled strategy checks, parameter sweeps
and CSV/JSON result files.

Output files contain no timing information so that a rerun with the same
configuration and seed reproduces them byte for byte.
"""

import csv
import dataclasses
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from exlab import bounds
from exlab.bounds import BoundReport
from exlab.game import CapExceeded, GameInstance, all_strings, all_subsets, restrict
from exlab.protocols import (
    STRATEGIES,
    AccuracyViolation,
    CompressedPJOStrategy,
    Strategy,
    build_strategy,
)

log = logging.getLogger(__name__)

QUANTUM_CAP = 10
CLASSICAL_CAP = 12
WILSON_Z = 1.959963984540054
MODES = ("exhaustive", "sampled", "bounds")
CSV_COLUMNS = (
    "suite", "n", "m", "gamma", "strategy", "param_k", "param_r", "param_t",
    "cost", "worst_err", "mean_err", "bound_name", "bound_value", "seed",
)


def quantum_cap() -> int:
    env = os.environ.get("EXLAB_MAX_QUBITS")
    return int(env) if env else QUANTUM_CAP


def classical_cap() -> int:
    return max(CLASSICAL_CAP, quantum_cap())


@dataclass
class ExperimentConfig:
    suite: str = "custom"
    n: int = 4
    m: int = 2
    gamma: Fraction = Fraction(0)
    strategy: str = "pjo"
    k: int | None = None
    r: int | None = None
    t: int | None = None
    eta: float | None = None
    mode: str = "exhaustive"
    trials: int = 1000
    seed: int = 0
    formulas: tuple = ()
    m_rule: str | None = None
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        self.gamma = parse_rational(self.gamma)
        self.formulas = tuple(self.formulas)
        if self.m_rule is not None:
            self.m = m_from_rule(self.m_rule, self.n)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        GameInstance(self.n, self.m, self.gamma)
        for name in self.formulas:
            if name not in bounds.FORMULAS:
                raise ValueError(f"unknown formula {name!r}")

    @property
    def game(self) -> GameInstance:
        return GameInstance(self.n, self.m, self.gamma)

    def build(self) -> Strategy:
        return build_strategy(
            self.strategy, self.n, self.m, self.gamma, k=self.k, r=self.r, t=self.t, eta=self.eta
        )


@dataclass
class ResultRecord:
    suite: str
    n: int
    m: int
    gamma: Fraction
    strategy: str
    params: dict
    mode: str
    seed: int
    trials: int | None
    cost: int
    worst_case_error: object
    mean_error: object
    ci_low: float | None = None
    ci_high: float | None = None
    bound_values: list = field(default_factory=list)
    wall_time: float | None = field(default=None, compare=False)


def parse_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, dict):
        return Fraction(value["num"], value["den"])
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(str(value).strip())


def m_from_rule(rule: str, n: int) -> int:
    if rule == "sqrt_nlogn":
        return min(n, math.ceil(math.sqrt(n * math.log2(n))))
    if rule == "sqrt_n":
        return min(n, math.ceil(math.sqrt(n)))
    raise ValueError(f"unknown m_rule {rule!r}")


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple:
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def _mean(values):
    if all(isinstance(v, Fraction) for v in values):
        return sum(values, Fraction(0)) / len(values)
    return math.fsum(float(v) for v in values) / len(values)


def strategy_bounds(strategy: Strategy) -> list:
    n, m = strategy.n, strategy.m
    name = strategy.name
    out = []
    if name == "pjo":
        out += bounds.evaluate("pjo_info_cost_bound", n, m)
    if isinstance(getattr(strategy, "inner", strategy), CompressedPJOStrategy):
        k = getattr(strategy, "inner", strategy).k
        out += bounds.evaluate("compression_error_exact", n, m, k)
        out += bounds.evaluate("compression_error_bound", n, m, k)
        if m >= 2 and k >= 1:
            out += bounds.evaluate("analytic_tail_bound", n, m, k)
        out += bounds.evaluate("compressed_qubits", n, m, k)
    if name in ("classical_sim", "amplified"):
        bits = strategy.cost
        out.append(BoundReport("classical_message_bits", float(bits), Fraction(bits),
                               {"t": strategy.q, "r": strategy.r}))
        out += bounds.evaluate("classical_ic_lower_bound", n, m)
    if name == "majority":
        out += bounds.evaluate("majority_error", n, m)
    if name == "random_guess":
        p = Fraction(1, 2**m)
        out.append(BoundReport("random_guess_error", float(p), p, {"m": m}))
    return out


def _record(config: ExperimentConfig, strategy: Strategy, **kw) -> ResultRecord:
    return ResultRecord(
        suite=config.suite, n=config.n, m=config.m, gamma=config.gamma,
        strategy=strategy.name, params=strategy.params(), mode=config.mode,
        seed=config.seed, **kw,
    )


def exhaustive_check(game: GameInstance, strategy: Strategy, config: ExperimentConfig | None = None,
                     cap: int | None = None) -> ResultRecord:
    """Exact worst-case and mean error of ``strategy`` over every input pair."""
    config = config or ExperimentConfig(n=game.n, m=game.m, gamma=game.gamma, strategy=strategy.name)
    if cap is None:
        cap = quantum_cap() if strategy.name in ("pjo", "compressed_pjo", "classical_sim", "amplified") else classical_cap()
    if game.n > cap:
        raise CapExceeded(
            f"n={game.n} exceeds the exhaustive cap {cap} for {strategy.name}; "
            "use sampled mode or raise EXLAB_MAX_QUBITS"
        )
    start = time.perf_counter()
    ys = list(all_subsets(game.n, game.m))
    errors = []
    for x in all_strings(game.n):
        errors.extend(strategy.error_profile(x, ys))
    worst = max(errors)
    return _record(
        config, strategy, trials=None, cost=strategy.cost, worst_case_error=worst,
        mean_error=_mean(errors), bound_values=strategy_bounds(strategy),
        wall_time=time.perf_counter() - start,
    )


def sample_input(n: int, m: int, rng) -> tuple:
    x = "".join("1" if b else "0" for b in rng.integers(0, 2, size=n))
    y = tuple(sorted(int(i) + 1 for i in rng.choice(n, size=m, replace=False)))
    return x, y


def sampled_check(game: GameInstance, strategy: Strategy, trials: int, seed: int,
                  config: ExperimentConfig | None = None) -> ResultRecord:
    """Play ``trials`` i.i.d. uniform rounds; empirical error with a Wilson 95% interval."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    config = config or ExperimentConfig(n=game.n, m=game.m, gamma=game.gamma,
                                        strategy=strategy.name, mode="sampled", seed=seed)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    losses = 0
    for _ in range(trials):
        x, y = sample_input(game.n, game.m, rng)
        try:
            z = strategy.play(x, y, rng)
        except AccuracyViolation:
            losses += 1
            continue
        losses += z == restrict(x, y)
    lo, hi = wilson_interval(losses, trials)
    return _record(
        config, strategy, trials=trials, cost=strategy.cost, worst_case_error=None,
        mean_error=Fraction(losses, trials), ci_low=lo, ci_high=hi,
        bound_values=strategy_bounds(strategy), wall_time=time.perf_counter() - start,
    )


def bounds_only(config: ExperimentConfig) -> ResultRecord:
    strategy = config.build()
    reports = []
    for name in config.formulas or ("pjo_info_cost_bound",):
        reports += bounds.evaluate(name, config.n, config.m, config.k)
    return ResultRecord(
        suite=config.suite, n=config.n, m=config.m, gamma=config.gamma,
        strategy=strategy.name, params=strategy.params(),
        mode="bounds", seed=config.seed, trials=None, cost=strategy.cost,
        worst_case_error=None, mean_error=None, bound_values=reports,
    )


def run(config: ExperimentConfig) -> ResultRecord:
    if config.mode == "bounds":
        return bounds_only(config)
    strategy = config.build()
    if config.mode == "exhaustive":
        return exhaustive_check(config.game, strategy, config)
    return sampled_check(config.game, strategy, config.trials, config.seed, config)


def sweep(config: ExperimentConfig, param: str, values, workers: int = 1) -> list:
    """One record per grid value, in grid order; point ``i`` uses seed ``seed ^ i``."""
    values = list(values)
    if not values:
        raise ValueError("sweep grid is empty")
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    if param not in fields or param in ("suite", "mode", "format", "output_path"):
        raise ValueError(f"cannot sweep over {param!r}")
    configs = [
        dataclasses.replace(config, **{param: v, "seed": config.seed ^ i})
        for i, v in enumerate(values)
    ]
    for c in configs:
        if c.mode != "bounds":
            c.build()
    if workers <= 1:
        return [run(c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, configs))


# -- serialization --------------------------------------------------------------


def rational_str(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if value is None:
        return ""
    return repr(value)


def _to_json(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def _from_json(value):
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return Fraction(value["num"], value["den"])
    return value


def record_to_dict(rec: ResultRecord) -> dict:
    out = {}
    for f in dataclasses.fields(ResultRecord):
        if f.name == "wall_time":
            continue
        v = getattr(rec, f.name)
        if f.name == "bound_values":
            v = [
                {"name": b.name, "value": b.value, "exact": _to_json(b.exact),
                 "inputs": {k: _to_json(x) for k, x in b.inputs.items()},
                 "applicable": b.applicable}
                for b in v
            ]
        elif f.name == "params":
            v = {k: _to_json(x) for k, x in v.items()}
        else:
            v = _to_json(v)
        out[f.name] = v
    return out


def record_from_dict(d: dict) -> ResultRecord:
    kw = {k: _from_json(v) for k, v in d.items() if k not in ("bound_values", "params")}
    kw["params"] = {k: _from_json(v) for k, v in d.get("params", {}).items()}
    kw["bound_values"] = [
        BoundReport(b["name"], b["value"], _from_json(b["exact"]), b["inputs"], b["applicable"])
        for b in d.get("bound_values", [])
    ]
    return ResultRecord(**kw)


def to_json(records) -> str:
    return json.dumps({"records": [record_to_dict(r) for r in records]}, indent=2) + "\n"


def from_json(text: str) -> list:
    return [record_from_dict(d) for d in json.loads(text)["records"]]


def csv_rows(rec: ResultRecord):
    base = {
        "suite": rec.suite, "n": rec.n, "m": rec.m, "gamma": rational_str(rec.gamma),
        "strategy": rec.strategy,
        "param_k": rec.params.get("k", ""), "param_r": rec.params.get("r", ""),
        "param_t": rec.params.get("t", ""), "cost": rec.cost,
        "worst_err": rational_str(rec.worst_case_error),
        "mean_err": rational_str(rec.mean_error), "seed": rec.seed,
    }
    if not rec.bound_values:
        yield {**base, "bound_name": "", "bound_value": ""}
    for b in rec.bound_values:
        value = rational_str(b.exact) if b.exact is not None else repr(b.value)
        if not b.applicable:
            value = f"not-applicable:{b.value!r}"
        yield {**base, "bound_name": b.name, "bound_value": value}


def to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerows(csv_rows(rec))
    return buf.getvalue()


def emit(records, path, fmt: str = "csv") -> Path:
    """Write records to ``path`` as ``csv`` or ``json``."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    text = to_csv(records) if fmt == "csv" else to_json(records)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


# -- configuration files ----------------------------------------------------------


def load_config(path) -> tuple:
    """Read a YAML/JSON config; returns ``(ExperimentConfig, sweep grid or None)``."""
    text = Path(path).read_text()
    data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a mapping")
    data = dict(data)
    game = data.pop("game", {}) or {}
    strat = data.pop("strategy", {}) or {}
    grid = data.pop("sweep", None)
    if isinstance(strat, str):
        strat = {"name": strat}
    flat = {**data, **game}
    if "name" in strat:
        flat["strategy"] = strat.pop("name")
    flat.update(strat)
    if "output" in flat:
        flat["output_path"] = flat.pop("output")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(flat) - known
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    config = ExperimentConfig(**flat)
    if grid is not None:
        if not isinstance(grid, dict) or "param" not in grid or "values" not in grid:
            raise ValueError(f"{path}: sweep needs 'param' and 'values'")
        if not grid["values"]:
            raise ValueError(f"{path}: sweep grid is empty")
    return config, grid
