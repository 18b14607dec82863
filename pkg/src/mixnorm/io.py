"""NDJSON persistence for spectrum series and CSV/JSON report helpers.

Series layout: one header line
``{"dims": d, "symmetry": ..., "system": ..., "params": {...}}`` followed by
one line per sample ``{"t": t, "coeffs": [[k1, (k2,) re, im], ...]}``.
Floats are written with 17 significant digits so a round trip is exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections.abc import Iterable
from contextlib import contextmanager
from typing import IO

import numpy as np

from .errors import MixnormError, ParseError
from .spectral import SYMMETRIES, FourierField, SpectrumSeries, make_field


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def _json_value(obj) -> str:
    """JSON text with floats at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def header_line(dims: int, symmetry: str, system: str = "", params: dict | None = None) -> str:
    return _json_value(
        {"dims": dims, "symmetry": symmetry, "system": system, "params": dict(params or {})}
    )


def sample_line(t: float, f: FourierField) -> str:
    coeffs = ",".join(
        "[" + ",".join(str(c) for c in k) + f",{fmt_float(v.real)},{fmt_float(v.imag)}]"
        for k, v in f
    )
    return f'{{"t": {fmt_float(t)}, "coeffs": [{coeffs}]}}'


def dump_series(series: SpectrumSeries, fp: IO[str]) -> None:
    dims = series.dims or series.params.get("dims", 1)
    symmetry = series.symmetry or series.params.get("symmetry", "one_sided")
    params = {k: v for k, v in series.params.items() if k not in ("dims", "symmetry")}
    fp.write(header_line(dims, symmetry, series.system, params) + "\n")
    for t, f in series:
        fp.write(sample_line(t, f) + "\n")


def dumps_series(series: SpectrumSeries) -> str:
    buf = io.StringIO()
    dump_series(series, buf)
    return buf.getvalue()


@contextmanager
def _open(path_or_fp, mode):
    if hasattr(path_or_fp, "read") or hasattr(path_or_fp, "write"):
        yield path_or_fp
    else:
        with open(path_or_fp, mode, encoding="utf-8", newline="\n") as fp:
            yield fp


def write_series(series: SpectrumSeries, path) -> None:
    with _open(path, "w") as fp:
        dump_series(series, fp)


def _parse_json(line: str, lineno: int):
    try:
        return json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON ({exc.msg})", lineno) from None


def _parse_field(record, dims: int, symmetry: str, real: bool, lineno: int) -> FourierField:
    coeffs = record.get("coeffs")
    if not isinstance(coeffs, list):
        raise ParseError("'coeffs' must be a list", lineno)
    entries = []
    for row in coeffs:
        if not isinstance(row, list) or len(row) != dims + 2:
            raise ParseError(f"coefficient row {row!r} does not have {dims + 2} entries", lineno)
        k = row[:dims]
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in k):
            raise ParseError(f"wavevector {k!r} is not integer", lineno)
        re_, im_ = row[dims:]
        if not all(isinstance(x, (int, float)) for x in (re_, im_)):
            raise ParseError(f"amplitude {row[dims:]!r} is not numeric", lineno)
        entries.append((tuple(k), complex(float(re_), float(im_))))
    try:
        return make_field(entries, dims=dims, symmetry=symmetry, real=real)
    except MixnormError as exc:
        raise ParseError(str(exc), lineno) from None


def parse_series(lines: Iterable[str]) -> SpectrumSeries:
    header = None
    times, fields = [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        rec = _parse_json(line, lineno)
        if not isinstance(rec, dict):
            raise ParseError("each line must hold a JSON object", lineno)
        if header is None:
            if "dims" not in rec or "symmetry" not in rec:
                raise ParseError("first record must be the header with 'dims' and 'symmetry'", lineno)
            if rec["dims"] not in (1, 2) or rec["symmetry"] not in SYMMETRIES:
                raise ParseError("unsupported dims/symmetry in header", lineno)
            header = rec
            continue
        if "t" not in rec:
            raise ParseError("sample record lacks 't'", lineno)
        t = rec["t"]
        if not isinstance(t, (int, float)) or isinstance(t, bool):
            raise ParseError("'t' must be numeric", lineno)
        if times and float(t) <= times[-1]:
            raise ParseError("sample times must be strictly increasing", lineno)
        real = bool(header.get("params", {}).get("real", False))
        fields.append(_parse_field(rec, header["dims"], header["symmetry"], real, lineno))
        times.append(float(t))
    if header is None:
        raise ParseError("empty input: no header record", 1)
    params = dict(header.get("params") or {})
    params.setdefault("dims", header["dims"])
    params.setdefault("symmetry", header["symmetry"])
    return SpectrumSeries(tuple(times), tuple(fields), str(header.get("system", "")), params)


def read_series(path) -> SpectrumSeries:
    with _open(path, "r") as fp:
        return parse_series(fp)


def write_field(f: FourierField, path, t: float = 0.0, system: str = "", params=None) -> None:
    """Persist a single field as a one-sample series."""
    p = dict(params or {})
    p.setdefault("real", bool(f.real and f.symmetry == "full_lattice"))
    series = SpectrumSeries((t,), (f,), system, p)
    write_series(series, path)


def read_field(path) -> FourierField:
    series = read_series(path)
    if len(series) != 1:
        raise ParseError(f"expected exactly one sample, found {len(series)}")
    return series.fields[0]


def write_json(obj, path) -> None:
    text = _json_value(obj) + "\n"
    if path is None or path == "-":
        print(text, end="")
        return
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(text)


def write_csv(rows: Iterable[Iterable], header: list[str], path) -> None:
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return fmt_float(v) if math.isfinite(v) else str(float(v))
        if isinstance(v, (bool, np.bool_)):
            return "1" if v else "0"
        return "" if v is None else str(v)

    if path is None or path == "-":
        fp = io.StringIO()
    else:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        fp = open(path, "w", encoding="utf-8", newline="")
    try:
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([cell(v) for v in row])
        if path is None or path == "-":
            print(fp.getvalue(), end="")
    finally:
        fp.close()
