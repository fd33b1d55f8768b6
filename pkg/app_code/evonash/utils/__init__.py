"""Shared helpers: evidence bundle IO."""
