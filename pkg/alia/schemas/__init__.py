"""JSON schemas for configs and command reports."""
