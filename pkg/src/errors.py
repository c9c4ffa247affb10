"""Base exception shared by every opsim sub-package."""


class OpsimError(Exception):
    """Root of the opsim exception hierarchy."""
