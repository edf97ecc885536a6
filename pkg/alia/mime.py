"""Shared constants for alia notebook MIME rendering."""

ALIA_MIME_TYPE = "application/vnd.alia+json"
