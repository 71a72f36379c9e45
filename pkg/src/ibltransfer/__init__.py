"""Homotopy transfer of IBL-infinity structures with exact arithmetic."""
