"""Pytest root marker; shared generators live in helpers.py."""
