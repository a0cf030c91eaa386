"""Corpus-driven construction grammar induction with description-length
model comparison."""

__version__ = "0.1.0"
