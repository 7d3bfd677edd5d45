"""CSV and archive persistence."""
