"""Command-line verification runs with deterministic JSON reports."""
