import json
import math

import pytest

from engagement_lab.output import read_csv, write_csv, write_json


def test_csv_round_trip(tmp_path):
    path = write_csv(tmp_path / "sub" / "a.csv", ("x", "y", "ok"), [(0.1, math.inf, True), (2, 3.5, False)],
                     {"seed": 3, "version": "0.1.0"})
    meta, header, rows = read_csv(path)
    assert meta == {"seed": "3", "version": "0.1.0"}
    assert header == ["x", "y", "ok"]
    assert rows == [["0.1", "inf", "1"], ["2", "3.5", "0"]]
    assert not [p for p in path.parent.iterdir() if p.name.startswith(".")]


def test_bad_row_leaves_no_file(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "b.csv", ("x", "y"), [(1, 2), (3,)])
    assert list(tmp_path.iterdir()) == []


def test_json_handles_infinity(tmp_path):
    path = write_json(tmp_path / "c.json", {"tau": math.inf, "xs": (1, 2)})
    assert json.loads(path.read_text()) == {"tau": "inf", "xs": [1, 2]}
