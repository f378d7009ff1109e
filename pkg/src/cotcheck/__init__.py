"""Step-wise chain-of-thought verification against an SMT solver."""

__version__ = "0.1.0"
