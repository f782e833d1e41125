"""Converters from third-party formats into pedfuse's JSON files."""
