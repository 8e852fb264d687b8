"""
Proxy service configuration: a JSON file overridden by environment variables.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from ..core.errors import ConfigError
from ..core.models import RevocationMode

DEFAULT_LISTEN = "127.0.0.1:8480"

# Environment variable -> config field
ENV_OVERRIDES = {
    "REVABE_PROXY_LISTEN": "listen",
    "REVABE_PROXY_MODE": "mode",
    "REVABE_PROXY_TOKEN": "admin_token",
    "REVABE_PROXY_KEY_FILE": "proxy_key_path",
}


@dataclass
class ProxyConfig:
    """Listen address, revocation mode, admin token and initial proxy-key file."""
    admin_token: str
    listen: str = DEFAULT_LISTEN
    mode: RevocationMode = RevocationMode.KEY
    proxy_key_path: Optional[str] = None

    def __post_init__(self):
        if not self.admin_token:
            raise ConfigError("admin_token is required")
        if isinstance(self.mode, str):
            try:
                self.mode = RevocationMode(self.mode.lower())
            except ValueError:
                raise ConfigError(f"mode must be 'key' or 'attr', got {self.mode!r}") from None
        self._split_listen()

    @property
    def host(self) -> str:
        return self._split_listen()[0]

    @property
    def port(self) -> int:
        return self._split_listen()[1]

    def _split_listen(self) -> tuple[str, int]:
        host, sep, port = self.listen.rpartition(":")
        if not sep or not host or not port.isdigit() or not 0 <= int(port) <= 65535:
            raise ConfigError(f"listen must be host:port, got {self.listen!r}")
        return host, int(port)

    def to_dict(self) -> dict[str, Any]:
        """Serialize to dictionary."""
        return {
            "listen": self.listen,
            "mode": self.mode.value,
            "admin_token": self.admin_token,
            "proxy_key_path": self.proxy_key_path,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> ProxyConfig:
        """Deserialize from dictionary."""
        unknown = set(data) - {"listen", "mode", "admin_token", "proxy_key_path"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(
            admin_token=data.get("admin_token") or "",
            listen=data.get("listen") or DEFAULT_LISTEN,
            mode=data.get("mode") or RevocationMode.KEY.value,
            proxy_key_path=data.get("proxy_key_path"),
        )


def load_config(
    path: Union[str, Path, None] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ProxyConfig:
    """
    Read the config file (if any) and apply environment overrides.

    Args:
        path: JSON config file
        environ: Environment mapping (defaults to os.environ)

    Returns:
        Validated ProxyConfig
    """
    environ = os.environ if environ is None else environ
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must contain a JSON object")
    for variable, key in ENV_OVERRIDES.items():
        if environ.get(variable):
            data[key] = environ[variable]
    return ProxyConfig.from_dict(data)
