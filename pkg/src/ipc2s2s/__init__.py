"""Second-order intuitionistic propositional logic: proofs, finite and
interval semantics, and compilation to MSO over the binary tree."""

from .syntax import Formula, ParseError, desugar, format_formula, parse_formula

__version__ = "0.1.0"

__all__ = ["Formula", "ParseError", "desugar", "format_formula", "parse_formula", "__version__"]
