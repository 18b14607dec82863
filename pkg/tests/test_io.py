import io as stdio
import json

import numpy as np
import pytest

from mixnorm import FULL_LATTICE, SpectrumSeries, make_field
from mixnorm.errors import ParseError
from mixnorm.io import (
    dumps_series,
    fmt_float,
    parse_series,
    read_field,
    read_series,
    write_csv,
    write_field,
    write_json,
    write_series,
)

from _helpers import random_field


def test_fmt_float_round_trips():
    for x in (0.1, 1 / 3, 2.0**-1074, 1e308, -7.25):
        assert float(fmt_float(x)) == x
    with pytest.raises(ValueError):
        fmt_float(float("nan"))


def test_series_round_trip_is_exact(tmp_path, rng):
    fields = [random_field(rng, dims=2, symmetry=FULL_LATTICE, n_modes=5) for _ in range(4)]
    s = SpectrumSeries((0, 0.5, 1, 7.25), tuple(fields), "test", {"x": 0.1})
    path = tmp_path / "s.ndjson"
    write_series(s, path)
    back = read_series(path)
    assert back.times == s.times and back.system == "test"
    assert back.params["x"] == 0.1 and back.params["dims"] == 2
    for a, b in zip(s.fields, back.fields):
        assert a.to_dict() == b.to_dict()
    assert dumps_series(back) == path.read_text()


def test_header_layout():
    s = SpectrumSeries((0,), (make_field({1: 1 + 2j, 4: -0.5}),), "baker")
    lines = dumps_series(s).splitlines()
    header = json.loads(lines[0])
    assert header == {"dims": 1, "symmetry": "one_sided", "system": "baker", "params": {}}
    assert json.loads(lines[1]) == {"t": 0, "coeffs": [[1, 1, 2], [4, -0.5, 0]]}


def test_single_field_helpers(tmp_path):
    f = make_field({1: 0.5, -1: 0.5}, symmetry=FULL_LATTICE, real=True)
    write_field(f, tmp_path / "g.ndjson")
    g = read_field(tmp_path / "g.ndjson")
    assert g.to_dict() == f.to_dict() and g.real


HEADER = '{"dims": 1, "symmetry": "one_sided"}\n'


@pytest.mark.parametrize(
    "body, line, fragment",
    [
        ('{"t": 0, "coeffs": [[1, 1, 0]]}\n{oops\n', 3, "malformed JSON"),
        ('{"t": 0, "coeffs": [[0, 1, 0]]}\n', 2, "k = 0"),
        ('{"t": 0, "coeffs": [[1, 1]]}\n', 2, "entries"),
        ('{"t": 1, "coeffs": []}\n{"t": 1, "coeffs": []}\n', 3, "increasing"),
        ('{"coeffs": []}\n', 2, "lacks 't'"),
        ('{"t": 0, "coeffs": [[1.5, 1, 0]]}\n', 2, "integer"),
        ('[1, 2]\n', 2, "JSON object"),
    ],
)
def test_parse_errors_name_the_line(body, line, fragment):
    with pytest.raises(ParseError) as exc:
        parse_series(stdio.StringIO(HEADER + body))
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")
    assert fragment in str(exc.value)


def test_parse_requires_header():
    with pytest.raises(ParseError):
        parse_series(stdio.StringIO(""))
    with pytest.raises(ParseError):
        parse_series(stdio.StringIO('{"t": 0, "coeffs": []}\n'))


def test_real_header_enforces_hermitian_symmetry():
    text = (
        '{"dims": 1, "symmetry": "full_lattice", "params": {"real": true}}\n'
        '{"t": 0, "coeffs": [[1, 1, 1], [-1, 1, 1]]}\n'
    )
    with pytest.raises(ParseError):
        parse_series(stdio.StringIO(text))


def test_csv_and_json_writers(tmp_path, capsys):
    write_csv([[0.1, True, None, 3]], ["a", "b", "c", "d"], tmp_path / "x.csv")
    assert (tmp_path / "x.csv").read_text() == "a,b,c,d\n0.10000000000000001,1,,3\n"
    write_json({"v": np.float64(0.5), "xs": (1, 2)}, "-")
    assert json.loads(capsys.readouterr().out) == {"v": 0.5, "xs": [1, 2]}
