"""Two-layer real-fault / apparent-fault causal network.

Roots R_i (one per sensor, binary fault/ok) point at leaves A_j (binary
faulty/correct) for every j in EMB(i); leaf conditionals are noisy-OR.
Validation outcomes enter as hard evidence on the leaves and the root
posteriors form the fault-probability vector refined step by step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .inference import NoisyOrParams, noisy_or_root_posteriors, noisy_or_row
from .model import BayesNet, Cpt, EmbTable, Variable

FAULT, OK = "fault", "ok"
FAULTY, CORRECT = "faulty", "correct"

DEFAULT_LINK_STRENGTH = 0.99
DEFAULT_PRIOR = 0.5


def root_name(sensor: str) -> str:
    return f"R_{sensor}"


def apparent_name(sensor: str) -> str:
    return f"A_{sensor}"


@dataclass(frozen=True)
class IsolationNet:
    """The bipartite fault-isolation network derived from an EMB table."""

    sensors: tuple[str, ...]
    parents_of: dict                   # apparent sensor -> tuple of root sensors
    params: NoisyOrParams
    priors: dict                       # sensor -> prior fault probability
    emb: EmbTable = field(repr=False, default=None)

    def to_bayes_net(self) -> BayesNet:
        """Expand the noisy-OR conditionals into an explicit BayesNet."""
        variables = []
        edges = []
        cpts = {}
        for s in self.sensors:
            variables.append(Variable(root_name(s), (OK, FAULT)))
            pi = self.priors[s]
            cpts[root_name(s)] = Cpt(root_name(s), (),
                                     np.array([[1.0 - pi, pi]]))
        for s in self.sensors:
            causes = self.parents_of[s]
            variables.append(Variable(apparent_name(s), (CORRECT, FAULTY)))
            edges.extend((root_name(i), apparent_name(s)) for i in causes)
            rows = []
            for code in range(2 ** len(causes)):
                assignment = {
                    causes[k]: bool((code >> (len(causes) - 1 - k)) & 1)
                    for k in range(len(causes))
                }
                p = noisy_or_row(self.params, s, causes, assignment)
                rows.append([1.0 - p, p])
            cpts[apparent_name(s)] = Cpt(
                apparent_name(s), tuple(root_name(i) for i in causes),
                np.array(rows))
        return BayesNet(variables, edges, cpts)


def build_isolation_network(
    emb: EmbTable | Mapping,
    link_strength: float = DEFAULT_LINK_STRENGTH,
    prior: float = DEFAULT_PRIOR,
    link_overrides: Mapping[tuple, float] | None = None,
) -> IsolationNet:
    """Build the isolation network: arcs R_i -> A_j for every j in EMB(i).

    Uniform link strength and prior by default; ``link_overrides`` may set
    per-link strengths keyed by (cause sensor, effect sensor).
    """
    if not (0.0 < link_strength < 1.0):
        raise ValueError("link strength must lie in (0, 1)")
    if not (0.0 < prior < 1.0):
        raise ValueError("prior must lie in (0, 1)")
    if not isinstance(emb, EmbTable):
        emb = EmbTable(emb)
    sensors = tuple(sorted(emb))
    parents_of = {j: tuple(sorted(i for i in sensors if j in emb[i]))
                  for j in sensors}
    strengths = {}
    for j, causes in parents_of.items():
        for i in causes:
            strengths[(i, j)] = link_strength
    if link_overrides:
        for key, value in link_overrides.items():
            if key not in strengths:
                raise KeyError(f"no EMB arc for link override {key!r}")
            strengths[key] = float(value)
    return IsolationNet(
        sensors=sensors,
        parents_of=parents_of,
        params=NoisyOrParams(strengths),
        priors={s: prior for s in sensors},
        emb=emb,
    )


def fault_belief(iso: IsolationNet, findings: Mapping[str, str]) -> dict[str, float]:
    """P(R_i = fault | findings) for every sensor, recomputed from scratch.

    ``findings`` maps sensor -> "faulty"/"correct" apparent status.
    """
    observed = {}
    for sensor, status in findings.items():
        if sensor not in iso.parents_of:
            raise KeyError(f"finding for unknown sensor {sensor!r}")
        if status not in (FAULTY, CORRECT):
            raise ValueError(f"finding for {sensor!r} must be faulty/correct")
        observed[sensor] = status == FAULTY
    return noisy_or_root_posteriors(
        iso.sensors, iso.parents_of, iso.params, iso.priors, observed)


def declare_faults(pf: Mapping[str, float], threshold: float) -> frozenset[str]:
    """Sensors whose fault probability reaches the declaration threshold."""
    if not (0.0 < threshold < 1.0):
        raise ValueError("declaration threshold must lie in (0, 1)")
    return frozenset(s for s, p in pf.items() if p >= threshold)
