"""Toolkit for building and applying a spelling-normalization dictionary
for Moroccan Arabic (Darija) written in Latin script."""

__version__ = "0.1.0"
