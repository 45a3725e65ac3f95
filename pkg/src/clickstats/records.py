"""Readers and writers for every file format the command-line tool emits.

All formats are deterministic plain text: sample-record files are
comment-preambled integer columns, tables are comma-separated with a header
row, and structured output is compact JSON. Computed numbers are printed
with 12 significant digits; echoed parameters (state, config) use exact
shortest-round-trip JSON floats so a written file reparses to the identical
data model.
"""

from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np

from .click_kernel import ClickDistribution, DetectorConfig, NonclassicalityReport
from .errors import InsufficientData, InvalidSample, ParseError, ValidationError
from .estimators import EstimateReport
from .simulator import ClickSampleSet
from .states import StateSpec, state_from_dict

SAMPLE_HEADER = "clicks"


def format_number(value: float) -> str:
    """Fixed 12-significant-digit rendering used for all computed output."""
    return format(float(value), ".12g")


def _format_optional(value: float | None) -> str:
    return "" if value is None else format_number(value)


def _json_compact(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _round12(value: float | None):
    if value is None:
        return None
    return float(format_number(value))


# ---------------------------------------------------------------------------
# sample-record files


def samples_to_text(samples: ClickSampleSet) -> str:
    lines = [
        f"# N={samples.N}",
        f"# seed={samples.seed}",
        f"# trials={samples.trials}",
    ]
    if samples.state_echo is not None:
        lines.append(f"# state={_json_compact(samples.state_echo.to_dict())}")
    if samples.config_echo is not None:
        cfg = samples.config_echo
        lines.append(
            "# config="
            + _json_compact({"N": cfg.N, "eta": cfg.eta, "nu": cfg.nu})
        )
    lines.append(SAMPLE_HEADER)
    lines.extend(str(int(c)) for c in samples.clicks)
    return "\n".join(lines) + "\n"


def write_samples(path: str, samples: ClickSampleSet) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(samples_to_text(samples))


def samples_from_text(text: str) -> ClickSampleSet:
    meta: dict[str, str] = {}
    rows: list[int] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if seen_header:
                continue
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        if not seen_header:
            if line != SAMPLE_HEADER:
                raise ParseError(
                    f"line {lineno}: expected header {SAMPLE_HEADER!r}, got {line!r}"
                )
            seen_header = True
            continue
        try:
            rows.append(int(line))
        except ValueError:
            raise ParseError(f"line {lineno}: expected an integer, got {line!r}")

    if not rows:
        raise InsufficientData("sample file contains no click records")
    if "N" not in meta:
        raise ParseError("sample file preamble is missing N")
    try:
        N = int(meta["N"])
    except ValueError:
        raise ParseError(f"preamble N={meta['N']!r} is not an integer")

    clicks = np.asarray(rows, dtype=np.int64)
    if clicks.min() < 0 or clicks.max() > N:
        raise InvalidSample(f"click records must lie in [0, {N}]")

    seed = 0
    if "seed" in meta:
        try:
            seed = int(meta["seed"])
        except ValueError:
            raise ParseError(f"preamble seed={meta['seed']!r} is not an integer")
    trials = len(rows)
    if "trials" in meta:
        try:
            declared = int(meta["trials"])
        except ValueError:
            raise ParseError(f"preamble trials={meta['trials']!r} is not an integer")
        if declared != trials:
            raise ParseError(
                f"preamble declares {declared} trials but file holds {trials}"
            )

    state_echo = None
    if "state" in meta:
        try:
            state_echo = state_from_dict(json.loads(meta["state"]))
        except json.JSONDecodeError as exc:
            raise ParseError(f"preamble state is not valid JSON: {exc}")
    config_echo = None
    if "config" in meta:
        try:
            raw_cfg = json.loads(meta["config"])
        except json.JSONDecodeError as exc:
            raise ParseError(f"preamble config is not valid JSON: {exc}")
        if not isinstance(raw_cfg, dict) or set(raw_cfg) != {"N", "eta", "nu"}:
            raise ParseError("preamble config must carry exactly N, eta, nu")
        config_echo = DetectorConfig(
            N=raw_cfg["N"], eta=float(raw_cfg["eta"]), nu=float(raw_cfg["nu"])
        )

    return ClickSampleSet(
        N=N,
        clicks=clicks,
        seed=seed,
        trials=trials,
        config_echo=config_echo,
        state_echo=state_echo,
    )


def read_samples(path: str) -> ClickSampleSet:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read sample file {path!r}: {exc}")
    return samples_from_text(text)


# ---------------------------------------------------------------------------
# click distributions


def emit_distribution(dist: ClickDistribution, fmt: str = "table") -> str:
    if fmt == "structured":
        payload = {"N": dist.N, "probs": [_round12(p) for p in dist.probs]}
        return _json_compact(payload) + "\n"
    lines = ["k,c_k"]
    lines.extend(f"{k},{format_number(p)}" for k, p in enumerate(dist.probs))
    return "\n".join(lines) + "\n"


def parse_distribution(text: str, fmt: str = "table") -> ClickDistribution:
    if fmt == "structured":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid structured distribution: {exc}")
        if not isinstance(payload, dict) or set(payload) != {"N", "probs"}:
            raise ParseError("structured distribution must carry N and probs")
        return ClickDistribution(int(payload["N"]), np.asarray(payload["probs"]))
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "k,c_k":
        raise ParseError("distribution table must start with header 'k,c_k'")
    probs = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'k,c_k' columns")
        try:
            k, p = int(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: malformed row {line!r}")
        if k != len(probs):
            raise ParseError(f"line {lineno}: click index {k} out of order")
        probs.append(p)
    if not probs:
        raise ParseError("distribution table has no rows")
    return ClickDistribution(len(probs) - 1, np.asarray(probs))


# ---------------------------------------------------------------------------
# nonclassicality reports


_REPORT_FIELDS = ("q_b", "q_m_clicks", "q_m_photons", "click_mean", "click_variance")


def emit_nonclassicality(report: NonclassicalityReport, fmt: str = "table") -> str:
    values = {name: getattr(report, name) for name in _REPORT_FIELDS}
    if fmt == "structured":
        return _json_compact({k: _round12(v) for k, v in values.items()}) + "\n"
    lines = ["quantity,value"]
    lines.extend(f"{k},{_format_optional(v)}" for k, v in values.items())
    return "\n".join(lines) + "\n"


def parse_nonclassicality(text: str, fmt: str = "table") -> NonclassicalityReport:
    if fmt == "structured":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid structured report: {exc}")
        if set(payload) != set(_REPORT_FIELDS):
            raise ParseError(f"report must carry exactly {_REPORT_FIELDS}")
        return NonclassicalityReport(**payload)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "quantity,value":
        raise ParseError("report table must start with header 'quantity,value'")
    values: dict[str, float | None] = {}
    for line in lines[1:]:
        key, _, raw = line.partition(",")
        if key not in _REPORT_FIELDS:
            raise ParseError(f"unknown report quantity {key!r}")
        values[key] = float(raw) if raw else None
    if set(values) != set(_REPORT_FIELDS):
        raise ParseError(f"report must carry exactly {_REPORT_FIELDS}")
    return NonclassicalityReport(**values)


# ---------------------------------------------------------------------------
# estimate reports


_ESTIMATE_COLUMNS = (
    "statistic",
    "point_estimate",
    "ci_low",
    "ci_high",
    "confidence_level",
    "sample_size",
    "bootstrap_replicates",
    "degenerate_resamples",
)


def emit_estimates(reports: Sequence[EstimateReport], fmt: str = "table") -> str:
    if fmt == "structured":
        payload = [
            {
                "statistic": r.statistic_name,
                "point_estimate": _round12(r.point_estimate),
                "ci_low": _round12(r.ci_low),
                "ci_high": _round12(r.ci_high),
                "confidence_level": r.confidence_level,
                "sample_size": r.sample_size,
                "bootstrap_replicates": r.bootstrap_replicates,
                "degenerate_resamples": r.degenerate_resamples,
            }
            for r in reports
        ]
        return _json_compact(payload) + "\n"
    lines = [",".join(_ESTIMATE_COLUMNS)]
    for r in reports:
        lines.append(
            ",".join(
                [
                    r.statistic_name,
                    format_number(r.point_estimate),
                    _format_optional(r.ci_low),
                    _format_optional(r.ci_high),
                    format_number(r.confidence_level),
                    str(r.sample_size),
                    str(r.bootstrap_replicates),
                    str(r.degenerate_resamples),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _estimate_from_fields(fields: dict) -> EstimateReport:
    return EstimateReport(
        statistic_name=fields["statistic"],
        point_estimate=float(fields["point_estimate"]),
        ci_low=fields["ci_low"],
        ci_high=fields["ci_high"],
        confidence_level=float(fields["confidence_level"]),
        sample_size=int(fields["sample_size"]),
        bootstrap_replicates=int(fields["bootstrap_replicates"]),
        degenerate_resamples=int(fields["degenerate_resamples"]),
    )


def parse_estimates(text: str, fmt: str = "table") -> list[EstimateReport]:
    if fmt == "structured":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid structured estimates: {exc}")
        if not isinstance(payload, list):
            raise ParseError("structured estimates must be a list")
        return [_estimate_from_fields(item) for item in payload]
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != ",".join(_ESTIMATE_COLUMNS):
        raise ParseError("estimate table header does not match")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(_ESTIMATE_COLUMNS):
            raise ParseError(f"estimate row has {len(parts)} columns")
        fields = dict(zip(_ESTIMATE_COLUMNS, parts))
        fields["ci_low"] = float(fields["ci_low"]) if fields["ci_low"] else None
        fields["ci_high"] = float(fields["ci_high"]) if fields["ci_high"] else None
        out.append(_estimate_from_fields(fields))
    return out


# ---------------------------------------------------------------------------
# sweep tables


_SWEEP_VALUE_COLUMNS = ("q_b", "q_m_clicks", "click_mean", "click_variance")


def emit_sweep(
    axis_name: str, rows: Sequence[tuple[float, float, float, float, float]],
    fmt: str = "table",
) -> str:
    if fmt == "structured":
        payload = [
            {
                axis_name: _round12(row[0]),
                **{col: _round12(v) for col, v in zip(_SWEEP_VALUE_COLUMNS, row[1:])},
            }
            for row in rows
        ]
        return _json_compact(payload) + "\n"
    lines = [",".join((axis_name,) + _SWEEP_VALUE_COLUMNS)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_sweep(text: str, fmt: str = "table") -> tuple[str, list[tuple[float, ...]]]:
    if fmt == "structured":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid structured sweep: {exc}")
        if not isinstance(payload, list) or not payload:
            raise ParseError("structured sweep must be a nonempty list")
        axis = next(
            k for k in payload[0] if k not in _SWEEP_VALUE_COLUMNS
        )
        rows = [
            (item[axis],) + tuple(item[c] for c in _SWEEP_VALUE_COLUMNS)
            for item in payload
        ]
        return axis, rows
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("sweep table is empty")
    header = lines[0].split(",")
    if len(header) != 5 or tuple(header[1:]) != _SWEEP_VALUE_COLUMNS:
        raise ParseError("sweep table header does not match")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"sweep row has {len(parts)} columns")
        rows.append(tuple(float(p) for p in parts))
    return header[0], rows
