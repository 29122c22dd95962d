"""Render publication-style figures from pauliprop CSV result files.

This package never recomputes science results: every figure is a pure
function of the CSV content it is given.
"""

from .figures import FigureSpec, render
from .schemas import SCHEMAS, SchemaError, read_csv

__version__ = "0.1.0"
