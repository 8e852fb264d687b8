"""
Application module for revocable ABE.
Contains the command-line toolkit.
"""

from .main import build_parser, main

__all__ = ["build_parser", "main"]
