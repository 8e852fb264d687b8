"""
Codec module: wire format, size model and the hybrid container.
"""

from .wire import (
    ComponentTag,
    decode,
    encode,
    peek_tag,
    read_component,
    write_component,
)
from .sizes import SizeModel, name_bytes
from .hybrid import open_hybrid, seal_hybrid

__all__ = [
    "ComponentTag",
    "decode",
    "encode",
    "peek_tag",
    "read_component",
    "write_component",
    "SizeModel",
    "name_bytes",
    "open_hybrid",
    "seal_hybrid",
]
