# src/orbitgauge/commands/__init__.py
"""Command package initialization."""
