"""SCLA - Safety Communication Layer Analyzer.

Namespace package containing:
- scla.sdk: residual error rate calculus, CRC analysis, safety protocol
  state machines, roaming topology and the black-channel simulator
- scla.cli: Command-line interface
"""

__version__ = "0.1.0"
