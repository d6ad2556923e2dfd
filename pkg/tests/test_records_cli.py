import json
from fractions import Fraction

import pytest

from cantor_bounds.cli import main
from cantor_bounds.lower import refine_lower_bound
from cantor_bounds.records import CACHE_ENV, RunRecord, cache_dir, load_records, write_record
from cantor_bounds.upper import upper_bound


@pytest.fixture
def cache(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    return tmp_path / "cache"


def test_cache_dir_env(cache):
    assert cache_dir() == cache
    assert cache_dir("elsewhere").name == "elsewhere"


def test_upper_record_round_trip(tmp_path):
    rec = RunRecord("upper", 2, 3, upper_bound(2, 3), flags={"method": "convolve"}, enumeration_count=16)
    back = RunRecord.from_json(rec.to_json())
    assert back.to_json() == rec.to_json()
    assert back.result.witness["diameter_sq"] == rec.result.witness["diameter_sq"]
    assert isinstance(back.result.witness["mu_low"], Fraction)


def test_lower_record_round_trip():
    chain = refine_lower_bound(1, 3, 1.0)
    rec = RunRecord("lower", 1, 3, chain)
    back = RunRecord.from_json(rec.to_json())
    assert back.result.final_L2 == chain.final_L2
    assert [s.conclusion for s in back.result.steps] == [s.conclusion for s in chain.steps]
    assert back.to_json() == rec.to_json()


def test_schema_layout():
    obj = RunRecord("upper", 2, 2, upper_bound(2, 2)).to_dict()
    assert set(obj) >= {"schema_version", "command", "params", "result", "timing"}
    assert set(obj["params"]) == {"d", "k", "flags"}
    assert {"direction", "value", "witness", "chain"} <= set(obj["result"])


def test_write_is_atomic_and_loadable(tmp_path):
    rec = RunRecord("upper", 2, 2, upper_bound(2, 2))
    path = write_record(rec, tmp_path)
    assert path.name == "upper-d2-k2.json"
    assert [p.name for p in tmp_path.iterdir()] == ["upper-d2-k2.json"]
    (tmp_path / "junk.json").write_text("{not json")
    assert [r.filename for r in load_records(tmp_path)] == ["upper-d2-k2.json"]


def test_rejects_unknown_schema():
    obj = RunRecord("upper", 2, 2, upper_bound(2, 2)).to_dict()
    obj["schema_version"] = 99
    with pytest.raises(ValueError):
        RunRecord.from_dict(obj)


def test_cli_upper_rerun_is_byte_identical(cache, capsys):
    assert main(["upper", "--dim", "2", "--depth", "4"]) == 0
    first = (cache / "upper-d2-k4.json").read_bytes()
    assert main(["upper", "--dim", "2", "--depth", "4", "--threads", "3", "--method", "enumerate"]) == 0
    second = json.loads((cache / "upper-d2-k4.json").read_text())
    assert second["result"] == json.loads(first)["result"]
    assert main(["upper", "--dim", "2", "--depth", "4"]) == 0
    assert (cache / "upper-d2-k4.json").read_bytes() == first
    assert "upper=" in capsys.readouterr().out


def test_cli_timing_flag(cache):
    assert main(["upper", "--dim", "1", "--depth", "3", "--timing"]) == 0
    rec = json.loads((cache / "upper-d1-k3.json").read_text())
    assert isinstance(rec["timing"]["wall_time_ms"], int)
    assert rec["result"]["value"] == 1.0


def test_cli_no_cache(cache):
    assert main(["upper", "--dim", "2", "--depth", "2", "--no-cache"]) == 0
    assert not cache.exists()


def test_cli_lower_d1(cache, capsys):
    assert main(["lower", "--dim", "1", "--depth", "1"]) == 0
    out = capsys.readouterr().out
    value = float(out.strip().splitlines()[-1].split("lower=")[1].split()[0])
    assert value >= 0.6902


def test_cli_lower_upper_bound_passthrough(cache, capsys):
    assert main(["lower", "--dim", "2", "--depth", "2", "--upper-bound", "1.5009"]) == 0
    rec = json.loads((cache / "lower-d2-k2.json").read_text())
    assert rec["result"]["witness"]["H_used"] == 1.5009


@pytest.mark.parametrize(
    "argv",
    [
        ["upper"],
        ["upper", "--dim", "0"],
        ["upper", "--dim", "2", "--depth", "zero"],
        ["lower", "--dim", "3", "--depth", "2", "--upper-bound", "-1"],
        ["lower", "--dim", "3", "--depth", "2", "--seed", "1/2"],
        ["frobnicate"],
    ],
)
def test_cli_argument_errors(cache, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def test_cli_replay_needs_d3(cache):
    assert main(["lower", "--dim", "2", "--depth", "2", "--replay", "--upper-bound", "1.6"]) == 1


def test_cli_budget_exit(cache):
    assert main(["upper", "--dim", "4", "--depth", "9", "--max-enum", "1000"]) == 2


def test_cli_replay_exit(cache, capsys):
    code = main(["lower", "--dim", "3", "--depth", "2", "--replay", "--upper-bound", "2.352741546983966"])
    captured = capsys.readouterr()
    assert code == 3
    assert "step 3" in captured.err
    assert "44/81" in captured.out


def test_cli_report_empty(cache):
    assert main(["report"]) == 4


def test_cli_report_formats(cache, capsys):
    assert main(["naive", "--max-dim", "3"]) == 0
    assert main(["upper", "--dim", "2", "--depth", "3"]) == 0
    assert main(["upper", "--dim", "2", "--depth", "5"]) == 0
    assert main(["lower", "--dim", "1", "--depth", "2", "--upper-bound", "1"]) == 0
    assert main(["report", "--format", "csv", "--format", "json", "--format", "plot"]) == 0
    out = cache / "report"
    lines = (out / "report.csv").read_text().splitlines()
    assert lines[0] == "d,s_d,naive,upper,lower,depth_upper,depth_lower"
    assert len(lines) == 4
    rows = json.loads((out / "report.json").read_text())
    d2 = next(r for r in rows if r["d"] == 2)
    assert d2["depth_upper"] == 5
    assert d2["upper"] == upper_bound(2, 5).value
    assert (out / "upper.dat").read_text().startswith("2 ")
    assert (out / "naive.dat").read_text().splitlines()[0] == "1 1.0"
    assert (out / "lower.dat").read_text().startswith("1 ")
