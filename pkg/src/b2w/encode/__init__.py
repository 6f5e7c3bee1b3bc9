"""Encoding of desugared Boogie programs as WhyML modules."""

from .context import EncodeContext, EncodeOptions, encode_type
from .exprs import encode_expr
from .names import RenameMap, Renamer
from .procedures import encode_frame_check, encode_implementation, encode_procedure, encode_val
from .program import EncodeResult, encode_program
from .stmts import encode_stmt

__all__ = [
    "EncodeContext",
    "EncodeOptions",
    "EncodeResult",
    "RenameMap",
    "Renamer",
    "encode_expr",
    "encode_frame_check",
    "encode_implementation",
    "encode_procedure",
    "encode_program",
    "encode_stmt",
    "encode_type",
    "encode_val",
]
