"""
HTTP client for the conversion proxy.
"""
from __future__ import annotations

import json
import logging
import urllib.error
import urllib.request
from typing import Any, Optional, Sequence

from ..codec.wire import encode
from ..core.algebra import Scalar
from ..core.errors import ProxyRequestError, RequesterRevoked, StaleProxyKey
from ..core.groups import BilinearContext, G2Element, get_context
from ..core.models import ConversionRequest, RequestLeaf, RevocationMode
from .protocol import AnyBundle, b64e, bundle_from_json, request_to_json
from .state import AnyProxyKey

logger = logging.getLogger(__name__)


def build_request(
    mode: RevocationMode,
    user_id: Scalar,
    components: Sequence[tuple],
) -> ConversionRequest:
    """
    Wrap scheme-level conversion components into a request.

    Args:
        mode: Revocation mode of the target proxy
        user_id: Identity presented to the proxy
        components: (leaf id, C'_y) pairs, or (leaf id, attribute, C'_y) in attr mode
    """
    if mode is RevocationMode.KEY:
        leaves = tuple(RequestLeaf(leaf_id, c_prime) for leaf_id, c_prime in components)
    else:
        leaves = tuple(
            RequestLeaf(leaf_id, c_prime, attribute) for leaf_id, attribute, c_prime in components
        )
    return ConversionRequest(mode=mode, user_id=user_id, leaves=leaves)


class ProxyClient:
    """Talks to one proxy at `base_url`, e.g. http://127.0.0.1:8480."""

    def __init__(
        self,
        base_url: str,
        token: Optional[str] = None,
        timeout: float = 10.0,
        ctx: Optional[BilinearContext] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.timeout = timeout
        self.ctx = ctx or get_context()

    def _call(self, method: str, path: str, body: Optional[dict] = None, auth: bool = False) -> dict:
        data = json.dumps(body).encode("utf-8") if body is not None else None
        req = urllib.request.Request(f"{self.base_url}{path}", data=data, method=method)
        req.add_header("Accept", "application/json")
        if data is not None:
            req.add_header("Content-Type", "application/json")
        if auth and self.token:
            req.add_header("Authorization", f"Bearer {self.token}")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read() or b"{}")
        except urllib.error.HTTPError as exc:
            try:
                payload: Any = json.loads(exc.read() or b"{}")
            except ValueError:
                payload = {}
            code = payload.get("error") if isinstance(payload, dict) else None
            detail = payload.get("detail", "") if isinstance(payload, dict) else ""
            message = f"proxy returned {exc.code} ({code or 'unknown'}) {detail}".strip()
            logger.debug("%s %s failed: %s", method, path, message)
            if exc.code == 403:
                raise RequesterRevoked(message) from None
            if exc.code == 409:
                raise StaleProxyKey(message) from None
            raise ProxyRequestError(message, status=exc.code, code=code) from None
        except (urllib.error.URLError, OSError) as exc:
            raise ProxyRequestError(f"cannot reach proxy at {self.base_url}: {exc}") from exc
        except ValueError as exc:
            raise ProxyRequestError(f"proxy sent invalid JSON: {exc}") from exc

    def info(self) -> dict:
        return self._call("GET", "/v1/info")

    def convert(self, request: ConversionRequest) -> AnyBundle:
        """
        Send a conversion request.

        Raises:
            RequesterRevoked: 403 from a whole-key proxy
            ProxyRequestError: any other failure
        """
        body = self._call("POST", "/v1/convert", request_to_json(self.ctx, request))
        return bundle_from_json(self.ctx, request.mode, body)

    def rekey(self, pxk: AnyProxyKey) -> int:
        """Push a proxy key; returns the version the proxy installed."""
        body = self._call(
            "POST", "/v1/rekey", {"proxy_key": b64e(encode(pxk, self.ctx))}, auth=True
        )
        version = body.get("version")
        if not isinstance(version, int):
            raise ProxyRequestError("rekey response carries no version")
        logger.info("proxy at %s now at version %d", self.base_url, version)
        return version

    def current_lambda(self, user_id: Scalar) -> tuple[int, Scalar]:
        """(version, lambda_k) for a whole-key proxy, via converting the G2 generator."""
        request = build_request(RevocationMode.KEY, user_id, [(0, self.ctx.g2)])
        bundle = self.convert(request)
        return bundle.version, bundle.lambda_k

    def convert_components(
        self, mode: RevocationMode, user_id: Scalar, components: Sequence[tuple]
    ) -> AnyBundle:
        return self.convert(build_request(mode, user_id, components))
