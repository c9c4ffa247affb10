"""Top-level package for the opsim power system operations simulator."""
