"""orbitgauge: certified Reeb-orbit, barcode and distance-bound computations."""

__version__ = "0.1.0"
