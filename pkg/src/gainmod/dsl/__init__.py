"""Expression language: parsing, calculus and modulation classification."""
from .calculus import compile_expr, differentiate, evaluate, evaluate_array, simplify
from .classify import (CollapseAxis, ModulationClass, TermClassification, classify_term,
                       sample_box)
from .definition import NonlinearTermDef, SystemDef, parse_definition
from .expr import Binary, Call, Constant, Expr, Unary, Variable, depth, free_vars, to_text
from .parser import parse, tokenize

__all__ = [
    "Binary", "Call", "Constant", "Expr", "Unary", "Variable",
    "parse", "tokenize", "to_text", "depth", "free_vars",
    "evaluate", "evaluate_array", "differentiate", "simplify", "compile_expr",
    "NonlinearTermDef", "SystemDef", "parse_definition",
    "ModulationClass", "CollapseAxis", "TermClassification", "classify_term", "sample_box",
]
