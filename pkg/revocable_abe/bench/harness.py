"""
Timing harness: warmup, repeated single-call timings, mean and 95% interval.
"""
from __future__ import annotations

import logging
import timeit
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

COLUMNS = ["suite", "param", "value", "impl", "mean_s", "ci95_s"]
Z_95 = 1.96
MIN_ITERATIONS = 10


def time_call(fn: Callable[[], object], iterations: int = MIN_ITERATIONS, warmup: int = 1) -> np.ndarray:
    """
    Time `fn` once per iteration after `warmup` untimed calls.

    Returns:
        Array of per-call durations in seconds
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    for _ in range(warmup):
        fn()
    timer = timeit.Timer(fn)
    return np.asarray(timer.repeat(repeat=iterations, number=1), dtype=float)


def summarize(samples: Sequence[float]) -> tuple[float, float]:
    """(mean, half-width of the normal-approximation 95% interval)."""
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise ValueError("no samples")
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(Z_95 * values.std(ddof=1) / np.sqrt(values.size))


def affine_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """
    Least-squares line through (x, y).

    Returns:
        (slope, intercept, R²); R² is 1.0 when y is constant and fitted exactly
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.size < 2:
        raise ValueError("an affine fit needs at least two points")
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = ys - (slope * xs + intercept)
    total = float(((ys - ys.mean()) ** 2).sum())
    ss_res = float((residual ** 2).sum())
    r2 = 1.0 - ss_res / total if total > 0 else (1.0 if ss_res < 1e-24 else 0.0)
    return float(slope), float(intercept), r2


def intervals_overlap(a: tuple[float, float], b: tuple[float, float]) -> bool:
    """Whether two (mean, ci95) intervals intersect."""
    return abs(a[0] - b[0]) <= a[1] + b[1]


@dataclass
class Measurement:
    """All samples for one (suite, parameter value, implementation) point."""
    suite: str
    param: str
    value: int
    impl: str
    samples: list[float] = field(default_factory=list)

    def extend(self, samples: Iterable[float]) -> None:
        self.samples.extend(float(s) for s in samples)

    def to_dict(self) -> dict:
        mean, ci95 = summarize(self.samples)
        return {
            "suite": self.suite,
            "param": self.param,
            "value": self.value,
            "impl": self.impl,
            "mean_s": mean,
            "ci95_s": ci95,
        }


def to_frame(measurements: Iterable[Measurement]) -> pd.DataFrame:
    """Rows in the stable CSV schema."""
    rows = [m.to_dict() for m in measurements]
    return pd.DataFrame(rows, columns=COLUMNS)


def fit_by_impl(frame: pd.DataFrame) -> pd.DataFrame:
    """Affine fit of mean_s against value for every (suite, impl) group."""
    rows = []
    for (suite, impl), group in frame.groupby(["suite", "impl"], sort=True):
        if len(group) < 2:
            continue
        slope, intercept, r2 = affine_fit(group["value"], group["mean_s"])
        rows.append({
            "suite": suite,
            "impl": impl,
            "points": len(group),
            "slope_s": slope,
            "intercept_s": intercept,
            "r2": r2,
        })
    return pd.DataFrame(rows, columns=["suite", "impl", "points", "slope_s", "intercept_s", "r2"])
