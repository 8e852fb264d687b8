"""
Revocable ABE

Ciphertext-policy attribute-based encryption with proxy-assisted revocation
of users and attributes, access delegation, a conversion proxy service, a
command-line toolkit and a benchmark harness.
"""

__version__ = "1.0.0"
