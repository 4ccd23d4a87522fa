"""Acceptance verdict lines, collected for the end-of-run summary."""
LINES = []
