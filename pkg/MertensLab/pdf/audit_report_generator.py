"""
PDF rendering of an audit report using ReportLab.

The document is built in invariant mode, so the same report always yields the
same bytes (no creation timestamp, fixed document id).

AUDIT PDF LAYOUT:

PAGE:
- A4 portrait, margins left/right 15mm, top 10mm, bottom 15mm
- Content width 180mm

STORY ORDER:
1) Title and artifact version
2) Config echo (two-column table)
3) Verdict table
4) Summary statistics: Mertens extrema, ε₀, ratio probes, partial sums
5) Footer on each page (canvas callback)

VERDICT TABLE (180mm):
- Columns (mm): [52 | 30 | 14 | 28 | 32 | 24]
- Headers: Claim | Range | Holds | First violation | Worst margin | At n
- Rows that fail are shaded
"""

from io import BytesIO
from typing import Any

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import mm
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

FAIL_SHADE = colors.Color(0.98, 0.86, 0.86)


def safe(v: Any, default: str = "-") -> str:
    return default if v is None else str(v)


def fmt_float(v: Any, digits: int = 6) -> str:
    if v is None:
        return "-"
    return f"{float(v):.{digits}g}"


def _styles():
    styles = getSampleStyleSheet()
    style_title = ParagraphStyle(
        "Title",
        parent=styles["Normal"],
        fontSize=14,
        leading=18,
        spaceAfter=6,
        alignment=TA_CENTER,
        fontName="Helvetica-Bold",
    )
    style_heading = ParagraphStyle(
        "Heading",
        parent=styles["Normal"],
        fontSize=10,
        leading=13,
        spaceBefore=8,
        spaceAfter=4,
        fontName="Helvetica-Bold",
    )
    style_text = ParagraphStyle(
        "Text",
        parent=styles["Normal"],
        fontSize=8,
        leading=10,
    )
    return style_title, style_heading, style_text


def _footer(canvas, doc):
    canvas.saveState()
    canvas.setFont("Helvetica", 8)
    canvas.drawCentredString(A4[0] / 2, 10 * mm, f"Page {doc.page}")
    canvas.restoreState()


def _grid_style(header_rows: int = 1):
    return [
        ("GRID", (0, 0), (-1, -1), 0.4, colors.grey),
        ("BACKGROUND", (0, 0), (-1, header_rows - 1), colors.Color(0.9, 0.9, 0.9)),
        ("FONTNAME", (0, 0), (-1, header_rows - 1), "Helvetica-Bold"),
        ("FONTSIZE", (0, 0), (-1, -1), 7.5),
        ("VALIGN", (0, 0), (-1, -1), "MIDDLE"),
        ("LEFTPADDING", (0, 0), (-1, -1), 3),
        ("RIGHTPADDING", (0, 0), (-1, -1), 3),
    ]


def _config_table(config: dict) -> Table:
    rows = [["Setting", "Value"]]
    for key, value in config.items():
        rows.append([key, ", ".join(str(v) for v in value) if isinstance(value, list) else safe(value)])
    table = Table(rows, colWidths=[60 * mm, 120 * mm])
    table.setStyle(TableStyle(_grid_style()))
    return table


def _verdict_table(verdicts: list) -> Table:
    rows = [["Claim", "Range", "Holds", "First violation", "Worst margin", "At n"]]
    style = _grid_style()
    for i, v in enumerate(verdicts, start=1):
        rows.append([
            v["claim_id"],
            f"{v['range'][0]} - {v['range'][1]}",
            "yes" if v["holds"] else "no",
            safe(v["first_violation"]),
            fmt_float(v["worst_margin"]),
            safe(v["argmax_n"]),
        ])
        if not v["holds"]:
            style.append(("BACKGROUND", (0, i), (-1, i), FAIL_SHADE))
    style.append(("ALIGN", (3, 1), (-1, -1), "RIGHT"))
    table = Table(rows, colWidths=[52 * mm, 30 * mm, 14 * mm, 28 * mm, 32 * mm, 24 * mm], repeatRows=1)
    table.setStyle(TableStyle(style))
    return table


def _simple_table(header: list, rows: list, widths: list) -> Table:
    table = Table([header, *rows], colWidths=[w * mm for w in widths])
    table.setStyle(TableStyle(_grid_style()))
    return table


def generate_audit_pdf_bytes(report: dict) -> bytes:
    """
    Build the audit PDF from a report dict as produced by build_audit.
    """
    buffer = BytesIO()
    doc = SimpleDocTemplate(
        buffer,
        pagesize=A4,
        leftMargin=15 * mm,
        rightMargin=15 * mm,
        topMargin=10 * mm,
        bottomMargin=15 * mm,
        title="Mertens lab audit",
        invariant=1,
    )
    style_title, style_heading, style_text = _styles()
    summaries = report["summaries"]
    story = []

    story.append(Paragraph("MERTENS LAB AUDIT", style_title))
    story.append(Paragraph(f"Artifact version {report['artifact_version']}", style_text))
    story.append(Spacer(1, 6))

    story.append(Paragraph("Configuration", style_heading))
    story.append(_config_table(report["config"]))

    held = sum(1 for v in report["verdicts"] if v["holds"])
    story.append(Paragraph(f"Verdicts ({held} of {len(report['verdicts'])} hold)", style_heading))
    story.append(_verdict_table(report["verdicts"]))

    extrema = summaries["mertens_extrema"]
    story.append(Paragraph("Mertens function", style_heading))
    story.append(Paragraph(
        f"M({extrema['n_max']}) = {extrema['mertens']}; "
        f"max |M(n)|/&radic;n = {fmt_float(extrema['max_abs_ratio'])} at n = {extrema['argmax_abs']} "
        f"(n &ge; {extrema['start']}); max M(n)/&radic;n = {fmt_float(extrema['max_ratio'])} at n = {extrema['argmax']}; "
        f"min = {fmt_float(extrema['min_ratio'])} at n = {extrema['argmin']}.",
        style_text,
    ))
    story.append(_simple_table(
        ["Threshold", "Exceeded"],
        [[fmt_float(t["threshold"]), "yes" if t["exceeded"] else "no"] for t in extrema["thresholds"]],
        [40, 30],
    ))

    story.append(Paragraph("Exponent estimates", style_heading))
    story.append(_simple_table(
        ["n", "c", "As printed", "Minus 1/2", "High precision", "|delta|"],
        [
            [e["n"], fmt_float(e["c"]), fmt_float(e["printed_form"]), fmt_float(e["corrected_form"]),
             fmt_float(e["reevaluated"]), fmt_float(e["abs_delta"], 3)]
            for e in summaries["epsilon0"]
        ],
        [30, 20, 35, 35, 35, 25],
    ))

    if summaries["ratio_probes"]:
        story.append(Paragraph("Ratio probes", style_heading))
        rows = []
        for probe in summaries["ratio_probes"]:
            for point in probe["points"]:
                rows.append([
                    probe["probe"], point["n"], fmt_float(point["ratio"], 12),
                    fmt_float(point["reevaluated"], 12), fmt_float(point["abs_delta"], 3),
                ])
        story.append(_simple_table(["Probe", "n", "Ratio", "High precision", "|delta|"], rows, [20, 30, 45, 45, 30]))

    story.append(Paragraph("Partial sums of &Sigma; &mu;(n) n<super>-s</super>", style_heading))
    story.append(_simple_table(
        ["sigma", "N", "|direct|", "boundary", "harmonic bound", "claimed constant"],
        [
            [fmt_float(p["sigma"]), p["N"], fmt_float(p["abs_direct"]), fmt_float(p["boundary_abs"]),
             fmt_float(p["harmonic_bound"]), fmt_float(p["claimed_constant"])]
            for p in summaries["partial_sums"]
        ],
        [20, 30, 32, 32, 33, 33],
    ))

    doc.build(story, onFirstPage=_footer, onLaterPages=_footer)
    return buffer.getvalue()
