"""
Run orchestration for the management commands: each run_* function takes a
validated config serializer and returns the bytes to write. Output files are
written atomically.
"""
import csv
import hashlib
import io
import logging
import os
import tempfile
from pathlib import Path

from django.conf import settings
from rest_framework.renderers import JSONRenderer

from .compute import claims_harness, series_lab, zeta_partial
from .compute.arith_core import classify_census, mertens_prefix
from .compute.exceptions import InvariantViolation, SegmentSizeError
from .compute.series_lab import ClosedForm, Probe, SeriesFamily, SeriesMode, SeriesSpec
from .serializers import (
    AuditRunSerializer,
    CensusSerializer,
    ClaimVerdictSerializer,
    MertensTraceSerializer,
    PartialSumTraceSerializer,
    RatioTraceSerializer,
    SeriesSampleSerializer,
)

logger = logging.getLogger(__name__)

CENSUS_COLUMNS = ("n", "ones", "primes", "nonsquarefree", "squarefree_even", "squarefree_odd", "mertens")
MERTENS_COLUMNS = ("n", "mertens")
SERIES_COLUMNS = ("family", "mode", "n", "value", "term_count")
CLAIM_COLUMNS = ("claim_id", "range_lo", "range_hi", "holds", "first_violation", "worst_margin", "argmax_n")
ZETA_COLUMNS = (
    "sigma", "t", "N", "direct_re", "direct_im", "abel_re", "abel_im", "boundary_abs", "harmonic_bound",
)
PROBE_DPS = 40


# =========================
# Formatting helpers
# =========================

def fmt_num(value) -> str:
    """Integers as-is, floats with 17 significant digits, None as an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.17g}"


def render_csv(columns, rows) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_num(cell) for cell in row])
    return buffer.getvalue().encode("utf-8")


def render_plotdata(columns, blocks) -> bytes:
    """Whitespace-separated columns under one '#' header; blocks are split by two blank lines."""
    lines = ["# " + " ".join(columns)]
    for i, rows in enumerate(blocks):
        if i:
            lines.extend(["", ""])
        lines.extend(" ".join(fmt_num(cell) for cell in row) for row in rows)
    return ("\n".join(lines) + "\n").encode("utf-8")


def render_json(data) -> bytes:
    return JSONRenderer().render(data, renderer_context={"indent": 2}) + b"\n"


def write_output(payload: bytes, output, stream=None) -> None:
    """
    Write payload to `output` via a temporary file in the same directory and
    os.replace, or to `stream` when no path is given.
    """
    if not output:
        stream.write(payload.decode("utf-8"), ending="")
        return
    target = Path(output)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_path, target)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    logger.info("[write_output] %s (%d bytes)", target, len(payload))


def check_segment_cap(config) -> None:
    data = config.validated_data
    if data["segment_size"] > data["max_segment_size"]:
        raise SegmentSizeError(
            f"segment size {data['segment_size']} exceeds the cap {data['max_segment_size']}"
        )


def decade_grid(n_max: int, first: int = 10) -> list[int]:
    grid = []
    point = first
    while point < n_max:
        grid.append(point)
        point *= 10
    grid.append(n_max)
    return grid


# =========================
# Commands
# =========================

def run_census(config) -> bytes:
    data = config.validated_data
    census = classify_census(data["n"], **config.scan_options())
    if data["format"] == "json":
        return render_json(CensusSerializer(census).data)
    return render_csv(CENSUS_COLUMNS, [[getattr(census, column) for column in CENSUS_COLUMNS]])


def run_mertens(config) -> bytes:
    data = config.validated_data
    trace = mertens_prefix(data["n"], data["checkpoints"], start=data["start"], **config.scan_options())
    rows = list(zip(trace.grid, trace.values))
    if data["format"] == "json":
        return render_json(MertensTraceSerializer(trace).data)
    if data["format"] == "plotdata":
        return render_plotdata(("n", "M(n)"), [rows])
    return render_csv(MERTENS_COLUMNS, rows)


def run_series(config) -> bytes:
    data = config.validated_data
    grid = data["grid"]
    if data["family"]:
        family = SeriesFamily(data["family"])
        mode = SeriesMode(data["mode"])
        samples = [series_lab.evaluate(SeriesSpec(family, mode, n)) for n in grid]
        rows = [(family.value, mode.value, s.spec.n, s.value, s.term_count) for s in samples]
        payload = SeriesSampleSerializer(samples, many=True).data
    elif data["probe"]:
        trace = series_lab.ratio_probe(Probe(data["probe"]), grid, workers=data["workers"])
        rows = [(trace.probe.value, SeriesMode.REAL.value, n, r, None) for n, r in zip(trace.grid, trace.ratios)]
        payload = RatioTraceSerializer(trace).data
    else:
        form = ClosedForm(data["closed_form"])
        rows = [(form.value, SeriesMode.REAL.value, n, series_lab.closed_form_sum(form, n), None) for n in grid]
        payload = [{"closed_form": form.value, "n": n, "value": value} for _, _, n, value, _ in rows]

    if data["format"] == "json":
        return render_json(payload)
    if data["format"] == "plotdata":
        return render_plotdata(("n", "value"), [[(row[2], row[3]) for row in rows]])
    return render_csv(SERIES_COLUMNS, rows)


def verdict_row(verdict):
    return (
        verdict.claim_id,
        verdict.n_range[0],
        verdict.n_range[1],
        verdict.holds_everywhere,
        verdict.first_violation,
        verdict.worst_margin,
        verdict.argmax_n,
    )


def run_claims(config) -> bytes:
    data = config.validated_data
    entries = claims_harness.find_claims(data["id"], data["c"] or None)
    verdicts = [
        claims_harness.check_bound(entry.spec, entry.quantity, data["range"], **config.scan_options())
        for entry in entries
    ]
    if data["format"] == "json":
        return render_json(ClaimVerdictSerializer(verdicts, many=True).data)
    return render_csv(CLAIM_COLUMNS, [verdict_row(v) for v in verdicts])


def run_zeta(config) -> bytes:
    data = config.validated_data
    grid = data["checkpoints"] or [data["N"]]
    if grid[-1] != data["N"]:
        grid = [*grid, data["N"]]
    traces = zeta_partial.sigma_sweep(data["sigma"], grid, data["c"], t=data["t"], **config.scan_options())
    if data["format"] == "json":
        return render_json(PartialSumTraceSerializer(traces, many=True).data)
    if data["format"] == "plotdata":
        return render_plotdata(
            ("N", "abs_direct"),
            [[(N, abs(value)) for N, value in zip(tr.grid, tr.direct_values)] for tr in traces],
        )
    rows = []
    for trace in traces:
        harmonic = trace.harmonic_bound or (None,) * len(trace.grid)
        for N, direct, abel, boundary, bound in zip(
            trace.grid, trace.direct_values, trace.abel_values, trace.boundary_abs, harmonic
        ):
            rows.append((
                trace.s.sigma, trace.s.t, N, direct.real, direct.imag, abel.real, abel.imag, boundary, bound,
            ))
    return render_csv(ZETA_COLUMNS, rows)


# =========================
# Audit
# =========================

def _probe_summaries(n_max: int, workers: int):
    if n_max < series_lab.PROBE_MIN_N:
        return []
    grid = [series_lab.PROBE_MIN_N] if n_max == series_lab.PROBE_MIN_N else [series_lab.PROBE_MIN_N, n_max]
    summaries = []
    for probe in Probe:
        trace = series_lab.ratio_probe(probe, grid, workers=workers)
        points = []
        for n, ratio in zip(trace.grid, trace.ratios):
            point = {"n": n, "ratio": ratio, "reevaluated": None, "abs_delta": None}
            if n <= settings.LAB_REEVAL_MAX_N:
                reference = series_lab.reevaluate_probe(probe, n, dps=PROBE_DPS)
                point.update(reevaluated=reference, abs_delta=abs(ratio - reference))
            points.append(point)
        summaries.append({"probe": probe.value, "points": points})
    return summaries


def _epsilon0_summary(n: int, c: float):
    value = claims_harness.epsilon0(n, c)
    reference = claims_harness.reevaluate_epsilon0(n, c, dps=PROBE_DPS)
    return {
        "n": n,
        "c": c,
        **value._asdict(),
        "reevaluated": reference.printed_form,
        "abs_delta": abs(value.printed_form - reference.printed_form),
    }


def _trace_summary(trace):
    direct = trace.direct_values[-1]
    abel = trace.abel_values[-1]
    return {
        "sigma": trace.s.sigma,
        "t": trace.s.t,
        "N": trace.grid[-1],
        "direct": [direct.real, direct.imag],
        "abs_direct": abs(direct),
        "abel": [abel.real, abel.imag],
        "boundary_abs": trace.boundary_abs[-1],
        "harmonic_bound": trace.harmonic_bound[-1] if trace.harmonic_bound else None,
        "claimed_constant": trace.claimed_constant,
    }


def build_audit(config) -> dict:
    """
    Run the full claim registry and the summary statistics at n_max. The
    result depends only on the config echo and the artifact version.
    """
    data = config.validated_data
    n_max = data["n_max"]
    c_values = data["c"]
    options = config.scan_options()

    entries = claims_harness.registered_claims(c_values)
    mertens_entries = [e for e in entries if e.quantity is claims_harness.Quantity.ABS_MERTENS]
    mertens_verdicts = dict(zip(
        (e.claim_id for e in mertens_entries),
        claims_harness.check_mertens_bounds([(e.spec, e.start) for e in mertens_entries], n_max, **options),
    ))
    verdicts = [
        mertens_verdicts.get(e.claim_id) or claims_harness.run_claim(e, n_max, **options)
        for e in entries
    ]

    zeta_grid = decade_grid(n_max)
    zeta_c = max(c_values)
    traces = zeta_partial.sigma_sweep(data["sigma"], zeta_grid, zeta_c, **options)
    verdicts.extend(zeta_partial.abel_verdict(trace) for trace in traces)
    verdicts.extend(zeta_partial.convergence_verdict(trace) for trace in traces if trace.claimed_constant is not None)

    ids = [v.claim_id for v in verdicts]
    if len(ids) != len(set(ids)):
        raise InvariantViolation("claim registry produced duplicate claim ids")

    census = classify_census(n_max, **options)
    extrema = claims_harness.mertens_extrema(
        n_max,
        [0.5 * c / (c - 1) for c in c_values] + [0.25 * c / (c - 1) for c in c_values] + [1.06],
        **options,
    )
    if extrema.mertens != census.mertens:
        raise InvariantViolation(f"M({n_max}) differs between prefix stream ({extrema.mertens}) and census ({census.mertens})")

    residual = claims_harness.eq12_residual(n_max, census=census)
    summaries = {
        "census": CensusSerializer(census).data,
        "mertens_extrema": {
            "n_max": extrema.n_max,
            "start": extrema.start,
            "mertens": extrema.mertens,
            "max_abs_ratio": extrema.max_abs_ratio,
            "argmax_abs": extrema.argmax_abs,
            "max_ratio": extrema.max_ratio,
            "argmax": extrema.argmax,
            "min_ratio": extrema.min_ratio,
            "argmin": extrema.argmin,
            "thresholds": [{"threshold": t, "exceeded": hit} for t, hit in extrema.exceeded.items()],
        },
        "epsilon0": [_epsilon0_summary(n_max, c) for c in c_values],
        "ratio_probes": _probe_summaries(n_max, data["workers"]),
        "eq12_residual": {
            "n": residual.n,
            "f1": residual.f1,
            "overlap": residual.overlap,
            "composites_residual": residual.composites_residual,
            "squarefree_residual": residual.squarefree_residual,
        },
        "partial_sums": [_trace_summary(trace) for trace in traces],
        "harmonic_c": zeta_c,
    }
    report = {
        "artifact_version": settings.LAB_ARTIFACT_VERSION,
        "config": config.config_echo(),
        "verdicts": ClaimVerdictSerializer(verdicts, many=True).data,
        "summaries": summaries,
    }
    held = sum(1 for v in verdicts if v.holds_everywhere)
    logger.info("[build_audit] n_max=%d verdicts=%d holding=%d", n_max, len(verdicts), held)
    return report


def save_audit(report: dict, payload: bytes):
    """Store the run and its verdicts; returns the AuditRun."""
    serializer = AuditRunSerializer(data={
        "artifact_version": report["artifact_version"],
        "n_max": report["config"]["n_max"],
        "config_echo": report["config"],
        "report_sha256": hashlib.sha256(payload).hexdigest(),
        "verdicts": [
            {
                "claim_id": v["claim_id"],
                "range_lo": v["range"][0],
                "range_hi": v["range"][1],
                "holds": v["holds"],
                "first_violation": v["first_violation"],
                "worst_margin": v["worst_margin"],
                "argmax_n": v["argmax_n"],
            }
            for v in report["verdicts"]
        ],
    })
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def emit_audit(config) -> tuple[dict, bytes]:
    """The audit report and its serialized bytes (JSON or PDF)."""
    report = build_audit(config)
    payload = render_json(report)
    if config.validated_data["format"] == "pdf":
        from MertensLab.pdf.audit_report_generator import generate_audit_pdf_bytes
        return report, generate_audit_pdf_bytes(report)
    return report, payload


RUNNERS = {
    "census": run_census,
    "mertens": run_mertens,
    "series": run_series,
    "claims": run_claims,
    "zeta": run_zeta,
}


def run_command(command: str, config) -> bytes:
    check_segment_cap(config)
    return RUNNERS[command](config)
