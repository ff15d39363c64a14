"""σ-subnormality and chain-depth invariants of small finite groups."""

__version__ = "0.1.0"
