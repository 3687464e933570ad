"""HTTP service exposing the kernel; the CLI is its first client."""

from .app import app

__all__ = ["app"]
