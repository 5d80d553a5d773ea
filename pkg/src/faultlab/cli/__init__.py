"""Command-line front end: config-driven campaigns and reports."""
