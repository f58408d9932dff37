"""Outlaw distributions over smooth Boolean functions and locally decodable codes."""

__version__ = "0.1.0"
