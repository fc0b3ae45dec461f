"""Serialization and host helpers."""
