"""Tests for the alia package."""
