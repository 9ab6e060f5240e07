"""Randomized end-to-end runs over the in-memory transport."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from statistics import mean

import numpy as np

from ..protocol import (
    SystemConfig,
    UpdateInstance,
    client_update,
    config_code,
    random_flips,
    random_library,
)
from ..pir.bounds import BoundsReport, bounds
from .server import DatabaseServer
from .transport import InMemoryTransport


@dataclass
class SimulationSummary:
    config: SystemConfig
    trials: int = 0
    passed: int = 0
    costs: list[int] = field(default_factory=list)

    @property
    def bounds(self) -> BoundsReport:
        c = self.config
        return bounds(c.N, c.K, c.L, c.f)

    @property
    def pass_rate(self) -> float:
        return self.passed / self.trials if self.trials else 0.0

    def lines(self) -> list[str]:
        b = self.bounds
        c = self.config
        costs = sorted(set(self.costs))
        return [
            f"config N={c.N} K={c.K} L={c.L} f={c.f} mode={c.mode}",
            f"trials {self.trials}, passed {self.passed} ({100 * self.pass_rate:.1f}%)",
            f"cost mean {mean(self.costs) if self.costs else 0:g}, distinct values {costs}",
            f"bounds lower {b.lower}, upper {b.upper}, naive {b.naive}",
        ]


def simulate(config: SystemConfig, trials: int, seed: int = 0) -> SimulationSummary:
    """Random libraries and outdated copies within the distortion model, decoded end to end."""
    rng = np.random.default_rng(seed)
    code = config_code(config)
    summary = SimulationSummary(config)
    for _ in range(trials):
        library = random_library(config.K, config.L, rng)
        theta = int(rng.integers(1, config.K + 1))
        flips = random_flips(config.L, config.f, rng, exact=config.mode == "exact_one_flip")
        instance = UpdateInstance(theta, library[theta] ^ flips, config.f)
        run_config = replace(config, seed=int(rng.integers(0, 2**63)))
        servers = [DatabaseServer(run_config, library, code) for _ in range(config.N)]
        report = client_update(run_config, instance, InMemoryTransport(servers), code)
        summary.trials += 1
        summary.passed += report.updated == library[theta]
        summary.costs.append(report.bits_downloaded)
    return summary
