"""
Proxy module for revocable ABE.
Contains the conversion service, its configuration and its HTTP client.
"""

from .client import ProxyClient, build_request
from .config import ProxyConfig, load_config
from .server import ProxyService, build_service, create_app, make_proxy_server
from .state import (
    PrecomputedProxyState,
    ProxySlot,
    fast_convert,
    fast_exponent,
    precompute,
    precompute_shares,
)

__all__ = [
    "ProxyClient",
    "build_request",
    "ProxyConfig",
    "load_config",
    "ProxyService",
    "build_service",
    "create_app",
    "make_proxy_server",
    "PrecomputedProxyState",
    "ProxySlot",
    "fast_convert",
    "fast_exponent",
    "precompute",
    "precompute_shares",
]
