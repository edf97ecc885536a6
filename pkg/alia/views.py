"""HTML views of algebras and reports for Jupyter notebooks.

Example usage:
    >>> from alia.liealg import sl2
    >>> from alia.views import BracketTableView
    >>> "[h, e]" in BracketTableView(sl2()).to_html()
    True
"""

from __future__ import annotations

import html
import uuid
from typing import Any, Dict, List, Optional, Sequence

from alia.mime import ALIA_MIME_TYPE

try:
    import IPython.display as _ipython_display_module
except ImportError:
    _ipython_display_module = None  # type: ignore[assignment]

_STYLE = """
<style>
.alia-view { font-family: ui-sans-serif, system-ui, sans-serif; color: #0f172a;
             border: 1px solid #d6deea; border-radius: 6px; padding: 10px 14px; }
.alia-view h4 { margin: 0 0 8px 0; font-size: 14px; }
.alia-view table { border-collapse: collapse; font-size: 13px; }
.alia-view td, .alia-view th { border-bottom: 1px solid #e2e8f0; padding: 3px 10px;
                               text-align: left; }
.alia-view .alia-mono { font-family: ui-monospace, monospace; }
.alia-view .alia-muted { color: #475569; font-size: 12px; }
.alia-view .alia-wild { color: #b91c1c; }
.alia-view .alia-tame { color: #15803d; }
</style>
"""


def _table(header: Sequence[str], rows: Sequence[Sequence[Any]], mono: bool = True) -> str:
    cell = ' class="alia-mono"' if mono else ""
    parts = ["<table><thead><tr>"]
    parts.extend(f"<th>{html.escape(str(h))}</th>" for h in header)
    parts.append("</tr></thead><tbody>")
    for row in rows:
        parts.append("<tr>" + "".join(f"<td{cell}>{html.escape(str(c))}</td>" for c in row) + "</tr>")
    parts.append("</tbody></table>")
    return "".join(parts)


class _View:
    """Common display plumbing; subclasses implement ``_render_body``."""

    title: str

    def __init__(self, title: Optional[str] = None):
        self.title = title or type(self).__name__
        self._element_id = f"alia-{uuid.uuid4().hex[:8]}"

    def _render_body(self) -> str:
        raise NotImplementedError

    def _payload(self) -> Dict[str, Any]:
        return {}

    def _render_html(self, include_style: bool = True) -> str:
        style = _STYLE if include_style else ""
        return (
            f'{style}<div class="alia-view" id="{self._element_id}">'
            f"<h4>{html.escape(self.title)}</h4>{self._render_body()}</div>"
        )

    def _repr_html_(self) -> str:
        return self._render_html()

    def _repr_mimebundle_(self, include=None, exclude=None):
        return {
            "text/html": self._render_html(),
            ALIA_MIME_TYPE: {"html": self._render_html(include_style=False), **self._payload()},
        }

    def display(self) -> None:
        if _ipython_display_module is not None:
            _ipython_display_module.display(_ipython_display_module.HTML(self._render_html()))
        else:
            print(self._render_html())

    def to_html(self, include_style: bool = True) -> str:
        """Return the HTML representation as a string."""
        return self._render_html(include_style=include_style)


class BracketTableView(_View):
    """Nonzero brackets of basis vectors of a StructLieAlgebra.

    Parameters
    ----------
    algebra : StructLieAlgebra
        The algebra to show.
    max_rows : int
        Brackets beyond this count are summarized.
    """

    def __init__(self, algebra: Any, title: Optional[str] = None, max_rows: int = 200):
        super().__init__(title or f"Lie algebra of dimension {algebra.dim}")
        self.algebra = algebra
        self.max_rows = max_rows

    def _render_body(self) -> str:
        lines = [line for line in self.algebra.bracket_table().splitlines() if line]
        rows: List[List[str]] = []
        for line in lines[: self.max_rows]:
            lhs, _, rhs = line.partition(" = ")
            rows.append([lhs, rhs])
        body = _table(["bracket", "value"], rows)
        labels = ", ".join(self.algebra.labels)
        extra = ""
        if len(lines) > self.max_rows:
            extra = f'<div class="alia-muted">{len(lines) - self.max_rows} more brackets</div>'
        return f'<div class="alia-muted alia-mono">basis: {html.escape(labels)}</div>{body}{extra}'

    def _payload(self) -> Dict[str, Any]:
        return {"algebra": self.algebra.to_json()}


class KacReportView(_View):
    """Kac coordinates, ω1 table and the carry pairs of a KacReport."""

    def __init__(self, report: Any, title: Optional[str] = None):
        fact = report.factorization
        super().__init__(title or f"Torsion of order {fact.nu0} ({fact.affine_type})")
        self.report = report

    def _render_body(self) -> str:
        from alia.kacroots import omega2_edges

        report = self.report
        summary = (
            f"raw exponents {report.raw} &rarr; {report.normalized} via "
            f"{html.escape(report.weyl_word_text)}; Kac coordinates {report.s}"
        )
        if report.canonicalized:
            summary += " (canonicalized)"
        rows = [
            [e.name, e.multiplicity, report.omega1_raw[e.key], report.omega1_normalized[e.key]]
            for e in report.groupoid.elements
        ]
        edges = [f"{{{a}, {b}}}" for a, b in omega2_edges(report.groupoid, report.omega2)]
        return (
            f'<div class="alia-muted">{summary}</div>'
            + _table(["element", "mult", "ω1 raw", "ω1"], rows)
            + f'<div class="alia-muted">ω2 = 1 on: {html.escape(", ".join(edges) or "none")}</div>'
        )

    def _payload(self) -> Dict[str, Any]:
        return {"kac": self.report.to_json()}


class WildnessView(_View):
    """Growth table of a WildnessReport."""

    def __init__(self, report: Any, title: Optional[str] = None):
        super().__init__(title or f"Solvable ideals at {report.point}")
        self.report = report

    def _render_body(self) -> str:
        parts = []
        for r in self.report.rows:
            verdict_class = "alia-wild" if r.classification.wild else "alia-tame"
            parts.append(
                f"<tr><td>{r.n}</td><td>{r.quotient_dim}</td><td>{r.solvable_dim}</td>"
                f"<td>{r.solvable}</td><td class=\"{verdict_class}\">{html.escape(r.verdict)}</td></tr>"
            )
        first = self.report.first_wild
        note = f"first wild quotient at n = {first}" if first is not None else "no wild quotient"
        return (
            f'<div class="alia-muted">{note}</div><table><thead><tr>'
            "<th>n</th><th>dim Q</th><th>dim K</th><th>solvable</th><th>verdict</th>"
            "</tr></thead><tbody>" + "".join(parts) + "</tbody></table>"
        )

    def _payload(self) -> Dict[str, Any]:
        return {"wildness": self.report.to_json()}
