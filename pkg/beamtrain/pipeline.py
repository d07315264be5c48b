"""
    Monte Carlo evaluation of the training methods on shared channel realizations.
"""

import dataclasses
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from biothings.utils.common import open_anyfile, timesofar
from biothings.utils.configuration import ConfigurationError

import beamtrain
from beamtrain.channel import ScenarioConfig, draw_user_azimuths, realize_channels
from beamtrain.codebook import Codebook, CodebookGeometry
from beamtrain.service import (
    MultiBeamTraining, RandomHashTraining, SingleBeamTraining,
    achievable_rate, power_for_snr, render_identification_trace,
)
from beamtrain.templates import render
from beamtrain.utils import InvalidArgumentError

log = logging.getLogger("beamtrain")

METHODS = ("single", "multi", "rh")
CSV_COLUMNS = [
    "method", "m", "snr_db", "training_symbols", "success_rate", "success_stderr",
    "avg_rate", "rate_stderr", "trials",
]
RESULT_FILES = {"csv": "results.csv", "json": "results.json", "trace": "trace.txt"}

# SeedSequence spawn-key streams of a trial
CHANNEL_STREAM, PLAN_STREAM, NOISE_STREAM = 0, 1, 2


def default_snr_grid() -> List[float]:
    return [30.0 + 2.5 * i for i in range(11)]


@dataclass
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    snr_grid_db: List[float] = field(default_factory=default_snr_grid)
    m_values: List[int] = field(default_factory=lambda: [2, 4, 8])
    methods: List[str] = field(default_factory=lambda: list(METHODS))
    trials: int = 1500
    out_dir: str = "results"
    noiseless: bool = False
    trace: bool = False
    trace_symbols: bool = False
    workers: int = 1
    frame_symbols: Optional[int] = None

    @classmethod
    def from_dict(cls, dic: dict) -> "ExperimentConfig":
        if not isinstance(dic, dict):
            raise ConfigurationError(f"Experiment config must be a JSON object. Got {type(dic).__name__}.")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(dic) - known)
        if unknown:
            raise ConfigurationError(f"Unknown config key(s): {', '.join(unknown)}.")
        dic = dict(dic)
        dic["scenario"] = ScenarioConfig.from_dict(dic.get("scenario", {}))
        try:
            cfg = cls(**dic)
        except TypeError as exc:
            raise ConfigurationError(f"Invalid experiment config: {exc}")
        return cfg.validate()

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open_anyfile(path) as file:
                dic = json.load(file)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"Cannot read config '{path}': {exc}")
        return cls.from_dict(dic)

    def to_dict(self) -> dict:
        dic = dataclasses.asdict(self)
        dic["scenario"] = self.scenario.to_dict()
        return dic

    def replace(self, **changes) -> "ExperimentConfig":
        """ Copy with overrides (None values are ignored), validated. """
        changes = {key: value for key, value in changes.items() if value is not None}
        if "seed" in changes:
            changes["scenario"] = dataclasses.replace(self.scenario, seed=changes.pop("seed"))
        return dataclasses.replace(self, **changes).validate()

    def validate(self) -> "ExperimentConfig":
        self.scenario.validate()
        if not isinstance(self.trials, int) or isinstance(self.trials, bool) or self.trials < 1:
            raise ConfigurationError(f"'trials' must be a positive integer. Got {self.trials!r}.")
        if not self.snr_grid_db:
            raise ConfigurationError("'snr_grid_db' must not be empty.")
        if not self.methods:
            raise ConfigurationError("'methods' must name at least one of single, multi, rh.")
        unknown = [method for method in self.methods if method not in METHODS]
        if unknown:
            raise ConfigurationError(f"Unknown method(s): {', '.join(map(str, unknown))}.")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigurationError("'methods' lists a method twice.")
        if set(self.methods) & {"multi", "rh"} and not self.m_values:
            raise ConfigurationError("'m_values' must not be empty for multi-beam methods.")
        for m in self.m_values:
            try:
                geo = CodebookGeometry(self.scenario.n_x, m)
            except (InvalidArgumentError, ValueError) as exc:
                raise ConfigurationError(f"Invalid sub-array count {m!r}: {exc}")
            if geo.l % 2:
                raise ConfigurationError(f"Sub-array count {m} leaves an odd sub-array size {geo.l}.")
        if self.workers < 1:
            raise ConfigurationError(f"'workers' must be at least 1. Got {self.workers}.")
        if self.frame_symbols is not None and self.frame_symbols < 1:
            raise ConfigurationError(f"'frame_symbols' must be positive. Got {self.frame_symbols}.")
        return self

    @property
    def cells(self) -> List[Tuple[str, int]]:
        """ (method, m) pairs in table order; single-beam training is the m = 1 case. """
        cells = []
        for method in METHODS:
            if method not in self.methods:
                continue
            if method == "single":
                cells.append((method, 1))
            else:
                cells.extend((method, m) for m in self.m_values)
        return cells


class MetricsTable:
    """
    Success rate and average rate per (method, m, snr_db), with normal-approximation standard errors.
    """

    def __init__(self, frame: pd.DataFrame, config: ExperimentConfig, records: Optional[List[dict]] = None):
        self.frame = frame
        self.config = config
        self.records = records

    def row(self, method: str, m: int, snr_db: float) -> pd.Series:
        match = self.frame[(self.frame.method == method) & (self.frame.m == m)
                           & np.isclose(self.frame.snr_db, snr_db)]
        if match.empty:
            raise KeyError((method, m, snr_db))
        return match.iloc[0]

    def to_dict(self) -> dict:
        return {
            "version": beamtrain.__version__,
            "seed": self.config.scenario.seed,
            "config": self.config.to_dict(),
            "rows": self.frame.to_dict(orient="records"),
        }


@dataclass
class TrialResult:
    trial: int
    success: np.ndarray  # cells x snr
    rate: np.ndarray
    records: List[dict] = field(default_factory=list)


class TrialRunner:
    """
    Evaluates every (method, m, snr) cell on one channel realization per trial.

    Randomness of trial t comes from SeedSequence(seed, spawn_key=(t, ...)) only, so results do not
    depend on the order or the process in which trials run.
    """

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.scenario = cfg.scenario
        self.codebook = Codebook(self.scenario.n_x)
        self.cells = cfg.cells
        self.powers = [power_for_snr(snr, self.scenario) for snr in cfg.snr_grid_db]
        self.single = SingleBeamTraining(self.codebook)
        self.multi = {m: MultiBeamTraining.for_subarrays(self.codebook, m) for m in cfg.m_values}

    def training_symbols(self, method: str, m: int) -> int:
        if method == "single":
            return self.single.training_symbols
        # random hashing runs on the multi-beam budget
        return self.multi[m].training_symbols

    def seed(self, trial: int, *key: int) -> np.random.SeedSequence:
        """
        Stream `key` of trial t. Streams are addressed by name, not by position, so adding a
        method or an m value leaves the draws of every other cell unchanged.
        """
        return np.random.SeedSequence(self.scenario.seed, spawn_key=(trial,) + key)

    def services(self, trial: int) -> list:
        services = []
        for method, m in self.cells:
            if method == "single":
                services.append(self.single)
            elif method == "multi":
                services.append(self.multi[m])
            else:
                services.append(RandomHashTraining.for_subarrays(
                    self.codebook, m, self.seed(trial, PLAN_STREAM, m), self.multi[m].training_symbols))
        return services

    def __call__(self, trial: int) -> TrialResult:
        n_snr = len(self.cfg.snr_grid_db)
        rng = np.random.default_rng(self.seed(trial, CHANNEL_STREAM))
        realization = realize_channels(self.scenario, draw_user_azimuths(self.scenario, rng), rng)
        services = self.services(trial)

        result = TrialResult(trial, np.empty((len(self.cells), n_snr)), np.empty((len(self.cells), n_snr)))
        for s, (snr_db, p_a) in enumerate(zip(self.cfg.snr_grid_db, self.powers)):
            for c, ((method, m), service) in enumerate(zip(self.cells, services)):
                cell_rng = np.random.default_rng(self.seed(trial, NOISE_STREAM, METHODS.index(method), m, s))
                outcome = service.train(realization, p_a, cell_rng, self.cfg.noiseless)
                hits = outcome.identified == realization.optimal_indices
                rates = achievable_rate(outcome.identified, realization, p_a, self.scenario, self.codebook)
                result.success[c, s] = hits.mean()
                result.rate[c, s] = rates.mean()
                if self.cfg.trace:
                    result.records.append({
                        "trial": trial, "method": method, "m": m, "snr_db": snr_db,
                        "optimal": realization.optimal_indices.tolist(),
                        "identified": outcome.identified.tolist(),
                        "rates": rates.tolist(),
                        "identification": render_identification_trace(outcome.observations, outcome.states)
                        if self.cfg.trace_symbols and outcome.states else None,
                    })
        return result


def _standard_error(samples: np.ndarray) -> np.ndarray:
    if samples.shape[0] < 2:
        return np.zeros(samples.shape[1:])
    return samples.std(axis=0, ddof=1) / np.sqrt(samples.shape[0])


def run_experiment(cfg: ExperimentConfig) -> MetricsTable:
    cfg.validate()
    runner = TrialRunner(cfg)
    t0 = time.time()
    log.info("Running %d trials over %d cells x %d SNR points (seed=%s, workers=%d).",
             cfg.trials, len(runner.cells), len(cfg.snr_grid_db), cfg.scenario.seed, cfg.workers)

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            results = list(executor.map(runner, range(cfg.trials), chunksize=max(1, cfg.trials // (4 * cfg.workers))))
    else:
        results = []
        for trial in range(cfg.trials):
            results.append(runner(trial))
            if (trial + 1) % max(1, cfg.trials // 10) == 0:
                log.info("%d/%d trials done (%s).", trial + 1, cfg.trials, timesofar(t0))

    # trial order is fixed, so the reductions below are reproducible
    success = np.stack([result.success for result in results])
    rate = np.stack([result.rate for result in results])
    success_mean, success_se = success.mean(axis=0), _standard_error(success)
    rate_mean, rate_se = rate.mean(axis=0), _standard_error(rate)

    rows = []
    for c, (method, m) in enumerate(runner.cells):
        symbols = runner.training_symbols(method, m)
        for s, snr_db in enumerate(cfg.snr_grid_db):
            row = {
                "method": method, "m": m, "snr_db": snr_db, "training_symbols": symbols,
                "success_rate": success_mean[c, s], "success_stderr": success_se[c, s],
                "avg_rate": rate_mean[c, s], "rate_stderr": rate_se[c, s], "trials": cfg.trials,
            }
            if cfg.frame_symbols:
                row["effective_rate"] = rate_mean[c, s] * max(0.0, 1.0 - symbols / cfg.frame_symbols)
            rows.append(row)

    columns = CSV_COLUMNS + (["effective_rate"] if cfg.frame_symbols else [])
    frame = pd.DataFrame(rows, columns=columns)
    records = [record for result in results for record in result.records] if cfg.trace else None
    log.info("Experiment finished in %s.", timesofar(t0))
    return MetricsTable(frame, cfg, records)


class ResultsWriteError(OSError):
    pass


def _native(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Cannot serialize {type(value).__name__}.")


def emit_results(table: MetricsTable, out_dir: Optional[str] = None, formats=("csv", "json"),
                 filenames: Optional[Dict[str, str]] = None) -> Dict[str, str]:
    """
    Write results.csv / results.json (and trace.txt when the table carries trace records).
    Returns {format: path}.
    """
    filenames = {**RESULT_FILES, **(filenames or {})}
    if table.frame.empty:
        raise ConfigurationError("Nothing to write: the metrics table is empty.")
    out_dir = out_dir or table.config.out_dir
    paths = {}
    target = out_dir
    try:
        os.makedirs(out_dir, exist_ok=True)
        if "csv" in formats:
            target = paths["csv"] = os.path.join(out_dir, filenames["csv"])
            table.frame.to_csv(target, index=False, lineterminator="\n")
        if "json" in formats:
            target = paths["json"] = os.path.join(out_dir, filenames["json"])
            with open(target, "w") as file:
                json.dump(table.to_dict(), file, indent=2, sort_keys=True, default=_native)
                file.write("\n")
        if table.records is not None:
            target = paths["trace"] = os.path.join(out_dir, filenames["trace"])
            with open(target, "w") as file:
                file.write(render("trace.txt", records=table.records))
    except OSError as exc:
        raise ResultsWriteError(f"Cannot write results to '{target}': {exc}") from exc
    for kind, path in paths.items():
        log.info("Wrote %s: %s", kind, path)
    return paths
