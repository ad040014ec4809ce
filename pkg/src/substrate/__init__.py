"""Toolkit for substitution pattern spaces: patterns on Z^d with rational
phases, substitution rules and their languages, fibres and recognisability,
period lattices, local derivations and exact geometric inflations."""

__version__ = "0.1.0"
