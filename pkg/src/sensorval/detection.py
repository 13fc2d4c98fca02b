"""Single-sensor validation against its Markov blanket.

Readings are discretized into uniform intervals, the sensor's posterior
is predicted from its blanket readings alone, and the actual reading is
classified apparently correct or faulty under a configurable criterion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .inference import Distribution, posterior_marginal
from .model import BayesNet, markov_blanket

DEFAULT_BINS = 10

SIGMA, PVALUE, TAU = "sigma", "pvalue", "tau"


class DiscretizerError(ValueError):
    pass


@dataclass(frozen=True)
class Discretizer:
    """Per-sensor uniform interval grids over the training range."""

    bins: int
    bounds: dict                       # sensor -> (lower, upper)

    def __post_init__(self):
        if self.bins < 2:
            raise DiscretizerError("need at least 2 intervals")
        for s, (lo, hi) in self.bounds.items():
            if not lo < hi:
                raise DiscretizerError(f"zero-width range for sensor {s!r}")

    def sensors(self) -> tuple[str, ...]:
        return tuple(self.bounds)

    def index(self, sensor: str, x: float) -> int:
        """Interval index of x; out-of-range values clamp to the edge intervals."""
        lo, hi = self.bounds[sensor]
        k = int(np.floor(self.bins * (x - lo) / (hi - lo)))
        return min(max(k, 0), self.bins - 1)

    def midpoints(self, sensor: str) -> np.ndarray:
        lo, hi = self.bounds[sensor]
        return lo + (np.arange(self.bins) + 0.5) * (hi - lo) / self.bins

    def state_label(self, k: int) -> str:
        return str(k)

    def states(self) -> tuple[str, ...]:
        return tuple(str(k) for k in range(self.bins))


def discretizer_to_json(d: Discretizer) -> str:
    return json.dumps({
        "bins": d.bins,
        "bounds": {s: [lo, hi] for s, (lo, hi) in sorted(d.bounds.items())},
    }, indent=1)


def discretizer_from_json(document: str) -> Discretizer:
    doc = json.loads(document)
    return Discretizer(int(doc["bins"]),
                       {s: (float(lo), float(hi))
                        for s, (lo, hi) in doc["bounds"].items()})


def fit_discretizer(rows: Sequence[Mapping[str, float]],
                    sensors: Sequence[str],
                    bins: int = DEFAULT_BINS) -> Discretizer:
    """Per-sensor bounds from the observed min/max of the training rows."""
    if not rows:
        raise DiscretizerError("no training rows")
    bounds = {}
    for s in sensors:
        values = np.array([row[s] for row in rows], dtype=float)
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            raise DiscretizerError(f"sensor {s!r} is constant in training data")
        bounds[s] = (lo, hi)
    return Discretizer(bins, bounds)


def discretize(d: Discretizer, sensor: str, x: float) -> int:
    return d.index(sensor, x)


@dataclass(frozen=True)
class DetectionCriterion:
    """Apparent-fault decision rule: sigma (k.sigma), pvalue (p), or tau."""

    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind not in (SIGMA, PVALUE, TAU):
            raise ValueError(f"unknown criterion kind {self.kind!r}")
        if self.kind == SIGMA and not self.parameter > 0:
            raise ValueError("sigma criterion needs k > 0")
        if self.kind in (PVALUE, TAU) and not 0 < self.parameter < 1:
            raise ValueError(f"{self.kind} parameter must lie in (0, 1)")


@dataclass(frozen=True)
class ApparentStatus:
    sensor: str
    faulty: bool

    @property
    def status(self) -> str:
        return "faulty" if self.faulty else "correct"


def predict_distribution(net: BayesNet, d: Discretizer,
                         reading: Mapping[str, float],
                         sensor: str) -> Distribution:
    """Posterior of the sensor given its discretized blanket readings only."""
    blanket = markov_blanket(net, sensor)
    evidence = {}
    for b in sorted(blanket):
        if b not in reading:
            raise KeyError(f"reading is missing blanket sensor {b!r} of {sensor!r}")
        evidence[b] = d.state_label(d.index(b, reading[b]))
    return posterior_marginal(net, evidence, sensor)


def posterior_moments(dist: Distribution, d: Discretizer,
                      sensor: str) -> tuple[float, float]:
    """Mean and standard deviation of the posterior over interval midpoints."""
    mids = d.midpoints(sensor)
    p = dist.probabilities
    mu = float((p * mids).sum())
    var = float((p * (mids - mu) ** 2).sum())
    return mu, float(np.sqrt(max(var, 0.0)))


def apply_criterion(x: float, dist: Distribution, d: Discretizer,
                    sensor: str, criterion: DetectionCriterion) -> ApparentStatus:
    """Classify the reading x against the predicted posterior."""
    if criterion.kind == SIGMA:
        mu, sigma = posterior_moments(dist, d, sensor)
        faulty = abs(x - mu) > criterion.parameter * sigma
    elif criterion.kind == PVALUE:
        mids = d.midpoints(sensor)
        mu, _ = posterior_moments(dist, d, sensor)
        tail = float(dist.probabilities[np.abs(mids - mu) >= abs(x - mu)].sum())
        faulty = tail < criterion.parameter
    else:
        faulty = float(dist.probabilities[d.index(sensor, x)]) < criterion.parameter
    return ApparentStatus(sensor, faulty)


def validate_sensor(net: BayesNet, d: Discretizer,
                    reading: Mapping[str, float], sensor: str,
                    criterion: DetectionCriterion) -> ApparentStatus:
    """The four-step single-sensor validation: predict from the blanket,
    then compare the actual reading under the criterion."""
    if sensor not in reading:
        raise KeyError(f"reading is missing sensor {sensor!r}")
    dist = predict_distribution(net, d, reading, sensor)
    return apply_criterion(reading[sensor], dist, d, sensor, criterion)
