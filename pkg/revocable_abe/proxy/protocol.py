"""
JSON bodies of the proxy's HTTP interface.

Scalars and group elements travel as unpadded base64url of their canonical
encodings.
"""
from __future__ import annotations

import base64
import binascii
from typing import Any, Union

from ..core.errors import MalformedInput
from ..core.groups import BilinearContext
from ..core.models import (
    AttrConversionBundle,
    ConversionBundle,
    ConversionRequest,
    RequestLeaf,
    RevocationMode,
)

AnyBundle = Union[ConversionBundle, AttrConversionBundle]


def b64e(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def b64d(text: Any) -> bytes:
    if not isinstance(text, str):
        raise MalformedInput("expected a base64url string")
    try:
        return base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))
    except (binascii.Error, ValueError) as exc:
        raise MalformedInput(f"invalid base64url: {exc}") from exc


def _int_field(entry: Any, name: str) -> int:
    value = entry.get(name) if isinstance(entry, dict) else None
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise MalformedInput(f"field {name!r} must be a non-negative integer")
    return value


def request_to_json(ctx: BilinearContext, request: ConversionRequest) -> dict[str, Any]:
    leaves = []
    for leaf in request.leaves:
        entry: dict[str, Any] = {"id": leaf.leaf_id, "c_prime": b64e(ctx.encode_g2(leaf.c_prime))}
        if request.mode is RevocationMode.ATTR:
            entry["attr"] = leaf.attribute
        leaves.append(entry)
    return {"user_id": b64e(ctx.encode_scalar(request.user_id)), "leaves": leaves}


def request_from_json(ctx: BilinearContext, mode: RevocationMode, payload: Any) -> ConversionRequest:
    """
    Parse a convert body.

    Raises:
        MalformedInput: missing or mistyped fields
        InvalidComponent: an element fails group validation
    """
    if not isinstance(payload, dict):
        raise MalformedInput("request body must be a JSON object")
    user_id = ctx.decode_scalar(b64d(payload.get("user_id")))
    raw_leaves = payload.get("leaves")
    if not isinstance(raw_leaves, list):
        raise MalformedInput("'leaves' must be a list")
    leaves = []
    for entry in raw_leaves:
        leaf_id = _int_field(entry, "id")
        attribute = None
        if mode is RevocationMode.ATTR:
            attribute = entry.get("attr")
            if not isinstance(attribute, str):
                raise MalformedInput("per-attribute requests carry 'attr' on every leaf")
        leaves.append(RequestLeaf(
            leaf_id=leaf_id,
            c_prime=ctx.decode_g2(b64d(entry.get("c_prime"))),
            attribute=attribute,
        ))
    return ConversionRequest(mode=mode, user_id=user_id, leaves=tuple(leaves))


def bundle_to_json(ctx: BilinearContext, bundle: AnyBundle) -> dict[str, Any]:
    if isinstance(bundle, ConversionBundle):
        return {
            "version": bundle.version,
            "lambda_k": b64e(ctx.encode_scalar(bundle.lambda_k)),
            "converted": [
                {"id": leaf_id, "c_dprime": b64e(ctx.encode_g2(c))}
                for leaf_id, c in sorted(bundle.converted.items())
            ],
        }
    return {
        "version": bundle.version,
        "converted": [
            {
                "id": leaf_id,
                "c_dprime": b64e(ctx.encode_g2(c)),
                "lambda_k": b64e(ctx.encode_scalar(bundle.lambdas[leaf_id])),
            }
            for leaf_id, c in sorted(bundle.converted.items())
        ],
        "revoked_leaves": sorted(bundle.revoked_leaves),
    }


def bundle_from_json(ctx: BilinearContext, mode: RevocationMode, body: Any) -> AnyBundle:
    if not isinstance(body, dict):
        raise MalformedInput("response body must be a JSON object")
    version = _int_field(body, "version")
    entries = body.get("converted")
    if not isinstance(entries, list):
        raise MalformedInput("'converted' must be a list")
    converted = {}
    lambdas = {}
    for entry in entries:
        leaf_id = _int_field(entry, "id")
        converted[leaf_id] = ctx.decode_g2(b64d(entry.get("c_dprime")))
        if mode is RevocationMode.ATTR:
            lambdas[leaf_id] = ctx.decode_scalar(b64d(entry.get("lambda_k")))
    if mode is RevocationMode.KEY:
        return ConversionBundle(
            version=version,
            lambda_k=ctx.decode_scalar(b64d(body.get("lambda_k"))),
            converted=converted,
        )
    revoked = body.get("revoked_leaves", [])
    if not isinstance(revoked, list) or not all(isinstance(i, int) for i in revoked):
        raise MalformedInput("'revoked_leaves' must be a list of integers")
    return AttrConversionBundle(
        version=version, converted=converted, lambdas=lambdas, revoked_leaves=frozenset(revoked)
    )
