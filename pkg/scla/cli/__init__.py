"""SCLA CLI - Command-line interface for the Safety Communication Layer Analyzer."""

# Import version from parent package
from scla import __version__
