"""
Runtime settings, overridable through SURROGATE_* environment variables or a .env file.
"""

from .settings import settings

__all__ = ["settings"]
