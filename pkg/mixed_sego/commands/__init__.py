"""Command modules for mixed-sego."""
