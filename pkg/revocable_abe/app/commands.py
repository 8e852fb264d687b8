"""
Subcommand implementations for the revocable-abe CLI.

Each command takes the parsed argparse namespace and returns an exit code;
library exceptions propagate to main() which maps them to exit codes.
"""
from __future__ import annotations

import logging
import os
import sys
from dataclasses import replace
from functools import cached_property
from pathlib import Path
from typing import Any, Optional, Sequence

import pandas as pd
from rapidfuzz import fuzz, process

from ..bench.suites import SUITES, SweepConfig, run_suite
from ..codec.hybrid import open_hybrid, seal_hybrid
from ..codec.wire import EXTENSIONS, ComponentTag, read_component, write_component
from ..core.algebra import Scalar
from ..core.attributes import split_attribute_list
from ..core.errors import NotSatisfied, PolicyNotSatisfied, UnknownUser
from ..core.groups import BilinearContext, get_context
from ..core.models import (
    AttrMasterKey,
    AttrProxyKey,
    BswSecretKey,
    DelegatedKeyMulti,
    DelegatedKeySingle,
    RevocationMode,
    UserRegistry,
)
from ..core.policy import parse_policy
from ..proxy.client import ProxyClient
from ..proxy.config import ENV_OVERRIDES, load_config
from ..proxy.server import make_proxy_server
from ..schemes.attr_revocation import AttrRevocationScheme
from ..schemes.delegation import DelegationScheme
from ..schemes.key_revocation import KeyRevocationScheme

logger = logging.getLogger(__name__)

TOKEN_ENV = next(var for var, key in ENV_OVERRIDES.items() if key == "admin_token")
MASTER_TAGS = (ComponentTag.MK, ComponentTag.ATTR_MK)
PROXY_KEY_TAGS = (ComponentTag.PXK, ComponentTag.ATTR_PXK)
KEY_TAGS = (
    ComponentTag.SK,
    ComponentTag.BSW_SK,
    ComponentTag.DELEGATED_SINGLE,
    ComponentTag.DELEGATED_MULTI,
)
SUGGESTION_CUTOFF = 80


class UsageError(Exception):
    """Flag combination the parser cannot express; exits with status 1."""


def suggest_user(registry: UserRegistry, name: str) -> Optional[str]:
    """Closest registered user name to `name`, if similar enough."""
    match = process.extractOne(name, registry.names(), scorer=fuzz.ratio, score_cutoff=SUGGESTION_CUTOFF)
    return match[0] if match else None


def lookup_identity(registry: UserRegistry, name: str) -> Scalar:
    try:
        return registry.identity_of(name)
    except UnknownUser:
        hint = suggest_user(registry, name)
        message = f"unknown user {name!r}" + (f"; did you mean {hint!r}?" if hint else "")
        raise UnknownUser(message) from None


def _scheme_for(ctx: BilinearContext, mk: Any):
    return AttrRevocationScheme(ctx) if isinstance(mk, AttrMasterKey) else KeyRevocationScheme(ctx)


def _mode_of(value: Any) -> RevocationMode:
    return RevocationMode.ATTR if isinstance(value, (AttrMasterKey, AttrProxyKey)) else RevocationMode.KEY


def _admin_token(args) -> Optional[str]:
    return args.token or os.environ.get(TOKEN_ENV)


class ConversionSource:
    """A live proxy (--proxy URL) or an offline proxy key (--pxk FILE)."""

    def __init__(
        self,
        ctx: BilinearContext,
        url: Optional[str] = None,
        pxk_path: Optional[Path] = None,
        flags: str = "--proxy/--pxk",
    ):
        if (url is None) == (pxk_path is None):
            raise UsageError(f"give exactly one of {flags}")
        self.ctx = ctx
        self.client = ProxyClient(url, ctx=ctx) if url else None
        self.pxk = read_component(pxk_path, PROXY_KEY_TAGS, ctx) if pxk_path else None

    @cached_property
    def mode(self) -> RevocationMode:
        if self.client is not None:
            return RevocationMode(self.client.info()["mode"])
        return _mode_of(self.pxk)

    def convert(self, user_id: Scalar, components: Sequence[tuple]):
        if self.client is not None:
            return self.client.convert_components(self.mode, user_id, components)
        if self.mode is RevocationMode.ATTR:
            return AttrRevocationScheme(self.ctx).convert(self.pxk, components, user_id)
        return KeyRevocationScheme(self.ctx).convert(self.pxk, components, user_id)

    def current_lambda(self, user_id: Scalar) -> tuple[int, Scalar]:
        if self.client is not None:
            return self.client.current_lambda(user_id)
        return KeyRevocationScheme(self.ctx).current_lambda(self.pxk, user_id)


def _require(components):
    if isinstance(components, NotSatisfied):
        raise PolicyNotSatisfied(components.reason)
    return components


def cmd_setup(args) -> int:
    ctx = get_context()
    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.mode == RevocationMode.ATTR.value:
        scheme = AttrRevocationScheme(ctx)
        pk, mk = scheme.setup(args.max_revoked, split_attribute_list(args.attrs or ""))
        pxk = scheme.proxy_rekey(pk, mk, {})
        mk_tag, pxk_tag = ComponentTag.ATTR_MK, ComponentTag.ATTR_PXK
    else:
        scheme = KeyRevocationScheme(ctx)
        pk, mk = scheme.setup(args.max_revoked)
        pxk = scheme.proxy_rekey(pk, mk, scheme.revocation_list(mk, []))
        mk_tag, pxk_tag = ComponentTag.MK, ComponentTag.PXK
    write_component(out_dir / f"public{EXTENSIONS[ComponentTag.PK]}", pk, ctx)
    write_component(out_dir / f"master{EXTENSIONS[mk_tag]}", mk, ctx)
    write_component(out_dir / f"proxy{EXTENSIONS[pxk_tag]}", pxk, ctx)
    print(f"setup complete in {out_dir} (mode={args.mode}, t={args.max_revoked}, proxy key version {pxk.version})")
    return 0


def cmd_keygen(args) -> int:
    ctx = get_context()
    mk = read_component(args.mk, MASTER_TAGS, ctx)
    scheme = _scheme_for(ctx, mk)
    known = set(mk.polynomials) if isinstance(mk, AttrMasterKey) else set()
    sk = scheme.keygen(mk, args.user, split_attribute_list(args.attrs))
    write_component(args.out, sk, ctx)
    write_component(args.mk, mk, ctx)
    print(f"issued key for {args.user} with {len(sk.components)} attributes -> {args.out}")
    new = sorted(set(sk.components) - known) if isinstance(mk, AttrMasterKey) else []
    if new:
        print(f"new attributes {', '.join(new)}: run 'revoke' to republish the proxy key", file=sys.stderr)
    return 0


def cmd_enc(args) -> int:
    ctx = get_context()
    tree = parse_policy(args.policy)
    pk = read_component(args.pk, ComponentTag.PK, ctx)
    payload = Path(args.infile).read_bytes()
    container = seal_hybrid(pk, payload, tree, ctx=ctx)
    size = write_component(args.out, container, ctx)
    print(f"encrypted {len(payload)} bytes under {tree.leaf_count}-leaf policy -> {args.out} ({size} bytes)")
    return 0


def _conversion_for(ctx: BilinearContext, container, key, args):
    ct = container.ciphertext
    if isinstance(key, BswSecretKey):
        return None
    delegation = DelegationScheme(ctx)
    if isinstance(key, DelegatedKeyMulti):
        components = _require(delegation.conversion_request(ct, key))
        source_a = ConversionSource(ctx, args.proxy, args.pxk)
        source_b = ConversionSource(ctx, args.proxy_b, args.pxk_b, "--proxy-b/--pxk-b")
        return (
            source_a.convert(key.delegator_id, components),
            source_b.convert(key.user_id, components),
        )
    source = ConversionSource(ctx, args.proxy, args.pxk)
    if isinstance(key, DelegatedKeySingle):
        return source.convert(key.user_id, _require(delegation.conversion_request(ct, key)))
    scheme = AttrRevocationScheme(ctx) if source.mode is RevocationMode.ATTR else KeyRevocationScheme(ctx)
    return source.convert(key.user_id, _require(scheme.conversion_request(ct, key)))


def cmd_dec(args) -> int:
    ctx = get_context()
    key = read_component(args.sk, KEY_TAGS, ctx)
    container = read_component(args.infile, ComponentTag.HYBRID_CONTAINER, ctx)
    bundle = _conversion_for(ctx, container, key, args)
    plaintext = open_hybrid(container, key, bundle, ctx)
    Path(args.out).write_bytes(plaintext)
    print(f"decrypted {len(plaintext)} bytes -> {args.out}")
    return 0


def split_names(text: Optional[str]) -> list[str]:
    """User names from a comma separated list, order kept, blanks dropped."""
    return [part.strip() for part in (text or "").split(",") if part.strip()]


def cmd_revoke(args) -> int:
    ctx = get_context()
    if not args.push and not args.out:
        raise UsageError("give --push URL, --out FILE or both")
    token = _admin_token(args)
    if args.push and not token:
        raise UsageError(f"--push needs --token or {TOKEN_ENV}")
    mk = read_component(args.mk, MASTER_TAGS, ctx)
    scheme = _scheme_for(ctx, mk)
    names = split_names(args.users)
    for name in names:
        lookup_identity(mk.registry, name)
    revoked = scheme.revocation_list(mk, names)
    if isinstance(mk, AttrMasterKey):
        revocations = dict(mk.revocations)
        if args.attribute:
            revocations[args.attribute] = revoked
        elif names:
            raise UsageError("per-attribute mode needs --attribute NAME")
        pxk = scheme.proxy_rekey(None, mk, revocations)
    else:
        if args.attribute:
            raise UsageError("--attribute applies to per-attribute mode only")
        pxk = scheme.proxy_rekey(None, mk, revoked)
    write_component(args.mk, mk, ctx)
    if args.out:
        write_component(args.out, pxk, ctx)
    if args.push:
        ProxyClient(args.push, token=token, ctx=ctx).rekey(pxk)
    scope = f" for attribute {args.attribute}" if args.attribute else ""
    print(f"proxy key version {pxk.version}: {len(revoked)} users revoked{scope}")
    return 0


def cmd_delegate(args) -> int:
    ctx = get_context()
    sk = read_component(args.sk, ComponentTag.SK, ctx)
    subset = split_attribute_list(args.attrs)
    delegation = DelegationScheme(ctx)
    pk = read_component(args.pk, ComponentTag.PK, ctx) if args.pk else None
    if args.mk_b or args.to:
        if not (args.mk_b and args.to):
            raise UsageError("friend-of-friend delegation needs both --mk-b and --to")
        mk_b = read_component(args.mk_b, ComponentTag.MK, ctx)
        identity = lookup_identity(mk_b.registry, args.to)
        dk = delegation.delegate_multi(sk, subset, mk_b, identity, pk_a=pk)
    else:
        if pk is None:
            raise UsageError("single-authority delegation needs --pk")
        version, lambda_k = ConversionSource(ctx, args.proxy, args.pxk).current_lambda(sk.user_id)
        dk = delegation.delegate_single(sk, subset, pk, lambda_k, lambda_version=version)
    write_component(args.out, dk, ctx)
    print(f"delegated {len(dk.components)} attributes -> {args.out}")
    return 0


def cmd_proxy(args) -> int:
    config = load_config(args.config)
    server = make_proxy_server(config)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("proxy shutting down")
    finally:
        server.server_close()
    return 0


def cmd_bench(args) -> int:
    config = SweepConfig.quick() if args.quick else SweepConfig()
    if args.iterations:
        config = replace(config, iterations=args.iterations)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    frames = [run_suite(name, config) for name in names]
    frame = frames[0] if len(frames) == 1 else pd.concat(frames, ignore_index=True)
    frame.to_csv(args.out, index=False)
    print(f"wrote {len(frame)} rows to {args.out}")
    return 0
