"""Process-wide services: parallel sweep queue and memo cache."""
