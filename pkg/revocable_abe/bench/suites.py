"""
Benchmark suites: parameter sweeps over key generation, encryption,
decryption, proxy rekey, proxy precalculation, conversion and delegated
decryption, each with the revocable scheme and (where one exists) the
baseline as separate `impl` rows.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from typing import Callable, Optional

import pandas as pd

from ..core.groups import BilinearContext, get_context
from ..core.models import RevocationList, RevocationMode
from ..core.policy import random_tree
from ..proxy.client import build_request
from ..proxy.state import fast_convert, precompute
from ..schemes.bsw import BswScheme
from ..schemes.delegation import DelegationScheme
from ..schemes.key_revocation import KeyRevocationScheme, convert_components
from .harness import Measurement, time_call, to_frame

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (1, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100)
REKEY_THRESHOLDS = (10, 100, 250, 500, 750, 1000)
BENCH_USER = "bench_user"


@dataclass(frozen=True)
class SweepConfig:
    """Sweep points and repetition counts shared by every suite."""
    sizes: tuple[int, ...] = DEFAULT_SIZES
    thresholds: tuple[int, ...] = REKEY_THRESHOLDS
    convert_t: int = 500
    iterations: int = 10
    warmup: int = 1
    policies: int = 10
    seed: int = 7

    @classmethod
    def quick(cls) -> SweepConfig:
        """Small sweep for smoke runs and tests."""
        return cls(sizes=(1, 3, 5), thresholds=(2, 4, 8, 16), convert_t=8, policies=2)

    @property
    def per_policy(self) -> int:
        return max(1, math.ceil(self.iterations / self.policies))

    @property
    def universe(self) -> list[str]:
        return [f"attr{i:03d}" for i in range(max(self.sizes))]


class _Sweep:
    def __init__(self, ctx: BilinearContext, config: SweepConfig):
        self.ctx = ctx
        self.config = config
        self.rng = random.Random(config.seed)
        self.revocable = KeyRevocationScheme(ctx)
        self.baseline = BswScheme(ctx)
        self.rows: list[Measurement] = []

    def measure(self, suite: str, param: str, value: int, impl: str) -> Measurement:
        m = Measurement(suite, param, value, impl)
        self.rows.append(m)
        return m

    def sample(self, m: Measurement, fn: Callable[[], object], iterations: Optional[int] = None) -> None:
        m.extend(time_call(fn, iterations or self.config.iterations, self.config.warmup))

    def policies(self, leaves: int, attributes: list[str]):
        for _ in range(self.config.policies):
            yield random_tree(self.rng, leaves, attributes)


def _keygen(s: _Sweep) -> None:
    pk, mk = s.revocable.setup(5, s.rng)
    _, bsw_mk = s.baseline.setup(s.rng)
    for n in s.config.sizes:
        attrs = s.config.universe[:n]
        s.sample(s.measure("keygen", "attributes", n, "revocable"),
                 lambda: s.revocable.keygen(mk, BENCH_USER, attrs, s.rng))
        s.sample(s.measure("keygen", "attributes", n, "baseline"),
                 lambda: s.baseline.keygen(bsw_mk, attrs, s.rng))


def _encrypt(s: _Sweep) -> None:
    pk, _ = s.revocable.setup(5, s.rng)
    bsw_pk, _ = s.baseline.setup(s.rng)
    for l in s.config.sizes:
        revocable = s.measure("encrypt", "leaves", l, "revocable")
        baseline = s.measure("encrypt", "leaves", l, "baseline")
        for tree in s.policies(l, s.config.universe[:l]):
            message = s.ctx.random_gt(s.rng)
            s.sample(revocable, lambda: s.revocable.encrypt(pk, message, tree, s.rng), s.config.per_policy)
            s.sample(baseline, lambda: s.baseline.encrypt(bsw_pk, message, tree, s.rng), s.config.per_policy)


def _decrypt(s: _Sweep) -> None:
    pk, mk = s.revocable.setup(5, s.rng)
    pxk = s.revocable.proxy_rekey(pk, mk, RevocationList(), s.rng)
    bsw_pk, bsw_mk = s.baseline.setup(s.rng)
    for l in s.config.sizes:
        attrs = s.config.universe[:l]
        sk = s.revocable.keygen(mk, BENCH_USER, attrs, s.rng)
        bsw_sk = s.baseline.keygen(bsw_mk, attrs, s.rng)
        revocable = s.measure("decrypt", "leaves", l, "revocable")
        baseline = s.measure("decrypt", "leaves", l, "baseline")
        for tree in s.policies(l, attrs):
            message = s.ctx.random_gt(s.rng)
            ct = s.revocable.encrypt(pk, message, tree, s.rng)
            bundle = s.revocable.convert(pxk, s.revocable.conversion_request(ct, sk), sk.user_id)
            bsw_ct = s.baseline.encrypt(bsw_pk, message, tree, s.rng)
            s.sample(revocable, lambda: s.revocable.decrypt(ct, sk, bundle), s.config.per_policy)
            s.sample(baseline, lambda: s.baseline.decrypt(bsw_ct, bsw_sk), s.config.per_policy)


def _rekey(s: _Sweep) -> None:
    for t in s.config.thresholds:
        pk, mk = s.revocable.setup(t, s.rng)
        s.revocable.keygen(mk, BENCH_USER, ["attr000"], s.rng)
        s.sample(s.measure("rekey", "t", t, "revocable"),
                 lambda: s.revocable.proxy_rekey(pk, mk, RevocationList(), s.rng))


def _precalc(s: _Sweep) -> None:
    for t in s.config.thresholds:
        pk, mk = s.revocable.setup(t, s.rng)
        pxk = s.revocable.proxy_rekey(pk, mk, RevocationList(), s.rng)
        s.sample(s.measure("precalc", "t", t, "revocable"), lambda: precompute(s.ctx.field, pxk))


def _convert(s: _Sweep) -> None:
    pk, mk = s.revocable.setup(s.config.convert_t, s.rng)
    sk = s.revocable.keygen(mk, BENCH_USER, ["attr000"], s.rng)
    pxk = s.revocable.proxy_rekey(pk, mk, RevocationList(), s.rng)
    state = precompute(s.ctx.field, pxk)
    for l in s.config.sizes:
        tree = random_tree(s.rng, l, ["attr000"])
        ct = s.revocable.encrypt(pk, s.ctx.random_gt(s.rng), tree, s.rng)
        components = [(leaf_id, leaf.c_prime) for leaf_id, leaf in enumerate(ct.leaves)]
        request = build_request(RevocationMode.KEY, sk.user_id, components)
        s.sample(s.measure("convert", "leaves", l, "precomputed"),
                 lambda: fast_convert(s.ctx, state, request))
        s.sample(s.measure("convert", "leaves", l, "direct"),
                 lambda: convert_components(s.ctx, pxk, components, sk.user_id))


def _delegated_decrypt(s: _Sweep) -> None:
    delegation = DelegationScheme(s.ctx)
    pk, mk = s.revocable.setup(5, s.rng)
    pxk = s.revocable.proxy_rekey(pk, mk, RevocationList(), s.rng)
    bsw_pk, bsw_mk = s.baseline.setup(s.rng)
    for l in s.config.sizes:
        attrs = s.config.universe[:l]
        sk = s.revocable.keygen(mk, BENCH_USER, attrs, s.rng)
        version, lambda_k = s.revocable.current_lambda(pxk, sk.user_id)
        dk = delegation.delegate_single(sk, attrs, pk, lambda_k, s.rng, version)
        bsw_dk = s.baseline.delegate(s.baseline.keygen(bsw_mk, attrs, s.rng), attrs, bsw_pk, s.rng)
        revocable = s.measure("delegated-decrypt", "leaves", l, "revocable")
        baseline = s.measure("delegated-decrypt", "leaves", l, "baseline")
        for tree in s.policies(l, attrs):
            message = s.ctx.random_gt(s.rng)
            ct = s.revocable.encrypt(pk, message, tree, s.rng)
            bundle = s.revocable.convert(pxk, delegation.conversion_request(ct, dk), dk.user_id)
            bsw_ct = s.baseline.encrypt(bsw_pk, message, tree, s.rng)
            s.sample(revocable, lambda: delegation.decrypt_delegated_single(ct, dk, bundle),
                     s.config.per_policy)
            s.sample(baseline, lambda: s.baseline.decrypt(bsw_ct, bsw_dk), s.config.per_policy)


SUITES: dict[str, Callable[[_Sweep], None]] = {
    "keygen": _keygen,
    "encrypt": _encrypt,
    "decrypt": _decrypt,
    "rekey": _rekey,
    "convert": _convert,
    "precalc": _precalc,
    "delegated-decrypt": _delegated_decrypt,
}


def run_suite(
    name: str,
    config: Optional[SweepConfig] = None,
    ctx: Optional[BilinearContext] = None,
) -> pd.DataFrame:
    """
    Run one suite and return its rows (suite, param, value, impl, mean_s, ci95_s).

    Raises:
        ValueError: unknown suite name
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    sweep = _Sweep(ctx or get_context(), config or SweepConfig())
    logger.info("running suite %s", name)
    SUITES[name](sweep)
    frame = to_frame(sweep.rows)
    logger.info("suite %s produced %d rows", name, len(frame))
    return frame
