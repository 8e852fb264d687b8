"""
The conversion proxy as an HTTP service.

State is exactly the installed proxy key, its precomputation and the admin
token; no master or user key ever enters this module.
"""
from __future__ import annotations

import hmac
import logging
from typing import Any, Optional

from flask import Flask, jsonify, request
from werkzeug.serving import BaseWSGIServer, make_server

from ..codec.wire import ComponentTag, decode, read_component
from ..core.errors import (
    AbeError,
    MalformedInput,
    RequesterRevoked,
    StaleProxyKey,
    UnprovisionedAttribute,
)
from ..core.groups import BilinearContext, get_context
from ..core.models import RevocationMode
from .config import ProxyConfig
from .protocol import b64d, bundle_to_json, request_from_json
from .state import AnyProxyKey, ProxySlot, fast_convert

logger = logging.getLogger(__name__)

Response = tuple[int, dict[str, Any]]

PROXY_KEY_TAGS = {
    RevocationMode.KEY: ComponentTag.PXK,
    RevocationMode.ATTR: ComponentTag.ATTR_PXK,
}


class ProxyService:
    """Request handling independent of the HTTP framework."""

    def __init__(
        self,
        mode: RevocationMode,
        admin_token: str,
        ctx: Optional[BilinearContext] = None,
    ):
        self.ctx = ctx or get_context()
        self.mode = mode
        self._admin_token = admin_token
        self.slot = ProxySlot(self.ctx.field, mode)

    def install(self, pxk: AnyProxyKey) -> int:
        return self.slot.install(pxk)

    def info(self) -> dict[str, Any]:
        snapshot = self.slot.snapshot()
        return {
            "version": snapshot[1].version if snapshot else 0,
            "t": snapshot[1].t if snapshot else 0,
            "mode": self.mode.value,
        }

    def handle_convert(self, payload: Any) -> Response:
        """Convert against the snapshot taken at the start of the request."""
        snapshot = self.slot.snapshot()
        if snapshot is None:
            return 503, {"error": "no_proxy_key"}
        state = snapshot[1]
        try:
            conversion = request_from_json(self.ctx, self.mode, payload)
            bundle = fast_convert(self.ctx, state, conversion)
        except RequesterRevoked:
            logger.warning("rejected convert at version %d: requester revoked", state.version)
            return 403, {"error": "revoked"}
        except UnprovisionedAttribute as exc:
            logger.warning("rejected convert at version %d: %s", state.version, exc)
            return 422, {"error": "unprovisioned_attribute", "detail": str(exc)}
        except AbeError as exc:
            logger.warning("rejected convert: %s", exc)
            return 400, {"error": "bad_request", "detail": str(exc)}
        logger.debug("converted %d leaves at version %d", len(conversion.leaves), state.version)
        return 200, bundle_to_json(self.ctx, bundle)

    def _authorized(self, authorization: Optional[str]) -> bool:
        scheme, _, token = (authorization or "").partition(" ")
        if scheme.lower() != "bearer" or not token:
            return False
        return hmac.compare_digest(token.strip().encode(), self._admin_token.encode())

    def handle_rekey(self, authorization: Optional[str], payload: Any) -> Response:
        """Install a pushed proxy key; the version must advance."""
        if not self._authorized(authorization):
            logger.warning("rejected rekey: bad or missing admin token")
            return 401, {"error": "unauthorized"}
        try:
            if not isinstance(payload, dict):
                raise MalformedInput("request body must be a JSON object")
            pxk = decode(b64d(payload.get("proxy_key")), PROXY_KEY_TAGS[self.mode], self.ctx)
        except AbeError as exc:
            logger.warning("rejected rekey: %s", exc)
            return 400, {"error": "bad_request", "detail": str(exc)}
        try:
            version = self.slot.install(pxk)
        except StaleProxyKey as exc:
            logger.warning("rejected rekey: %s", exc)
            return 409, {"error": "stale_key", "version": self.slot.version}
        return 200, {"version": version}


def create_app(service: ProxyService) -> Flask:
    """Flask application exposing /v1/convert, /v1/rekey and /v1/info."""
    app = Flask(__name__)
    app.config["PROXY_SERVICE"] = service

    @app.post("/v1/convert")
    def convert():
        status, body = service.handle_convert(request.get_json(silent=True))
        return jsonify(body), status

    @app.post("/v1/rekey")
    def rekey():
        status, body = service.handle_rekey(
            request.headers.get("Authorization"), request.get_json(silent=True)
        )
        return jsonify(body), status

    @app.get("/v1/info")
    def info():
        return jsonify(service.info()), 200

    return app


def build_service(config: ProxyConfig, ctx: Optional[BilinearContext] = None) -> ProxyService:
    """Service from config, with the initial proxy key installed if configured."""
    service = ProxyService(config.mode, config.admin_token, ctx)
    if config.proxy_key_path:
        pxk = read_component(config.proxy_key_path, PROXY_KEY_TAGS[config.mode], service.ctx)
        service.install(pxk)
    return service


def make_proxy_server(config: ProxyConfig, ctx: Optional[BilinearContext] = None) -> BaseWSGIServer:
    """Threaded WSGI server bound to config.listen; call serve_forever() to run."""
    service = build_service(config, ctx)
    server = make_server(config.host, config.port, create_app(service), threaded=True)
    logger.info(
        "proxy listening on %s:%d (mode=%s, version=%d)",
        config.host, server.server_port, config.mode.value, service.slot.version,
    )
    return server
