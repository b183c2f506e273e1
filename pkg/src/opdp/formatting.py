"""Format elements, listings and verification reports as plain text."""

from __future__ import annotations

from collections.abc import Iterable
from typing import TYPE_CHECKING, Any

from opdp.freegamma import FreeGammaElement, GammaTerm
from opdp.levelstep import FreeStepElement
from opdp.permrep import GVector
from opdp.scalar import Scalar

if TYPE_CHECKING:
    from opdp.verifier import CheckReport

MULTIPLY = "·"


def get_status_emoji(failed: int) -> str:
    """Get status emoji for a suite outcome."""
    return "✅" if failed == 0 else "❌"


def format_scalar(c: Scalar) -> str:
    return str(c)


def _with_coefficient(c: Scalar, body: str) -> str:
    return body if c == c.field.one() else f"{format_scalar(c)}{MULTIPLY}{body}"


def _join(parts: list[str]) -> str:
    return " + ".join(parts) if parts else "0"


def format_generator(g: Any) -> str:
    if isinstance(g, GammaTerm):
        return "{" + format_term(g) + "}"
    return str(g)


def format_term(term: GammaTerm) -> str:
    """``[x]@(r)(b_1,…,b_p)``; a bare generator renders as its name."""
    if term.is_generator():
        return format_generator(term.gens[0])
    labels = "[" + ",".join(map(str, term.x)) + "]"
    gens = ",".join(format_generator(g) for g in term.gens)
    return f"{labels}@{term.r}({gens})"


def format_free_gamma(a: FreeGammaElement) -> str:
    return _join([_with_coefficient(c, format_term(t)) for t, c in a.sorted_terms()])


def format_free_step(a: FreeStepElement) -> str:
    """Render a combination of sequences, e.g. ``3·[0,0,4]``; the empty sum is ``0``."""
    return _join([_with_coefficient(c, str(u)) for u, c in a.sorted_terms()])


def format_gvector(v: GVector) -> str:
    parts = [
        _with_coefficient(c, "[" + ",".join(map(str, x)) + "]")
        for x, c in sorted(v.terms.items())
    ]
    return _join(parts)


def format_value(value: Any) -> str:
    """Render whatever a relation side evaluates to."""
    if isinstance(value, FreeGammaElement):
        return format_free_gamma(value)
    if isinstance(value, FreeStepElement):
        return format_free_step(value)
    if isinstance(value, GVector):
        return format_gvector(value)
    if isinstance(value, Scalar):
        return format_scalar(value)
    return str(value)


def format_listing(title: str, items: Iterable[Any]) -> str:
    """Count header followed by one item per line."""
    lines = [str(item) for item in items]
    return "\n".join([f"{title}: {len(lines)}", *lines])


def format_report(report: CheckReport) -> str:
    """Summary line, then one line per failing case with its witness."""
    emoji = get_status_emoji(report.failed)
    bounds = ", ".join(f"{k}={v}" for k, v in sorted(report.bounds.items()))
    lines = [
        f"{emoji} {report.suite} over {report.field} ({bounds}): "
        f"{report.passed}/{report.attempted} passed, {report.failed} failed"
    ]
    for failure in report.failures:
        witness = "; ".join(f"{k}={v}" for k, v in failure.witness.items())
        lines.append(f"  case {failure.case} [{failure.relation}] {witness}")
    return "\n".join(lines)
