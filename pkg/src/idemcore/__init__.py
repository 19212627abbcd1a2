"""Idempotent cores of monads on finite categories and sheafification in finite presheaf toposes."""

__version__ = "0.1.0"
