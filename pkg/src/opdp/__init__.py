"""Exact divided power operations over set-spanned operads (Com, Lev)."""

__version__ = "0.1.0"
