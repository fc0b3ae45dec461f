"""Exact computational core: numbers, domains, orbits, barcodes and bounds."""
