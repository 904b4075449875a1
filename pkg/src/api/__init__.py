"""HTTP API for the qsp-braid engine"""

__all__ = ["server"]
