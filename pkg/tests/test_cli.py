import json
from pathlib import Path

import pytest

from critmaps.cli import DEFAULTS, main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_verify_all_pass(capsys):
    code, data = run_json(capsys, "verify", "--n", "4")
    assert code == 0 and data["all_pass"]
    assert data["defaults"] == DEFAULTS
    for rep in data["reports"]:
        assert {"check", "n", "verdict", "elapsed_ms"} <= set(rep)


def test_verify_refuses_large_n(capsys):
    code, _, err = run(capsys, "verify", "--n", "99", "--check", "critical-factorization")
    assert code == 2 and "n <= 6" in err


def test_verify_skips_out_of_range_checks(capsys):
    code, data = run_json(capsys, "verify", "--n", "7")
    assert code == 0
    assert {s["check"] for s in data["skipped"]} == {"critical-factorization", "uniqueness"}
    code, out, _ = run(capsys, "verify", "--n", "6", "--check", "lemma-snk")
    assert code == 0 and "[PASS] lemma-snk n=6" in out


def test_verify_unknown_check(capsys):
    code, _, err = run(capsys, "verify", "--n", "4", "--check", "bogus")
    assert code == 2


@pytest.mark.parametrize("argv", [["verify", "--n", "2"], ["frobnicate"], ["verify"], ["orbits", "--n", "x"]])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_orbits_text(capsys):
    code, out, _ = run(capsys, "orbits", "--n", "5")
    assert code == 0
    sizes = [int(line.split()[-2]) for line in out.splitlines()[1:]]
    assert sizes == [5, 5, 10, 10]


@pytest.mark.parametrize("argv,golden", [(["orbits", "--n", "5"], "orbits_n5.json"),
                                         (["map", "--n", "3"], "map_n3.json")])
def test_golden_json(capsys, argv, golden):
    _, data = run_json(capsys, *argv)
    assert data == json.loads((GOLDEN / golden).read_text())


def test_map_lift_scale(capsys):
    code, data = run_json(capsys, "map", "--n", "3", "--closed-form")
    assert code == 0 and data["scale"] == "6"
    assert data["components"][0] == [[[4, 0], "-1/6"], [[3, 1], "1/3"]]


def test_map_collapse(capsys):
    code, data = run_json(capsys, "map", "--n", "4", "--collapse", "2")
    assert code == 0 and len(data["collapse_directions"]) == 2


def test_coverage(capsys):
    code, data = run_json(capsys, "coverage", "--n", "3", "--samples", "500", "--seed", "4")
    assert code == 0
    assert {"resolved_fraction", "histogram", "unresolved", "defaults", "seed", "max_iter"} <= set(data)
    assert sum(data["histogram"].values()) + data["unresolved"] == 500


def test_coverage_threshold(capsys):
    code, _, _ = run(capsys, "coverage", "--n", "3", "--samples", "200", "--max-iter", "1",
                     "--min-fraction", "0.999")
    assert code == 1


def test_check_commands_exit_codes_agree(capsys):
    for argv in (["check-1d"], ["check-halley"], ["check-planar"], ["check-1d", "--map", "g5CP1"]):
        code, data = run_json(capsys, *argv)
        assert code == (0 if data["all_pass"] else 1)
        assert all((r["verdict"] == "pass") or code == 1 for r in data["reports"])


def test_check_halley_json(capsys):
    code, data = run_json(capsys, "check-halley")
    assert code == 0 and data["reports"][0]["check"] == "check-halley"


def test_render_preset(capsys, tmp_path):
    out = tmp_path / "g4.ppm"
    dump = tmp_path / "job.json"
    code, data = run_json(capsys, "render", "--preset", "g4", "--res", "32x24", "--out", str(out),
                          "--dump-config", str(dump))
    assert code == 0 and out.read_bytes().startswith(b"P6\n32 24\n")
    assert data["unresolved_fraction"] == 0
    code, _ = run_json(capsys, "render", "--config", str(dump), "--out", str(tmp_path / "again.ppm"))
    assert (tmp_path / "again.ppm").read_bytes() == out.read_bytes()


def test_render_needs_one_source(capsys):
    code, _, err = run(capsys, "render")
    assert code == 2


def test_render_bad_resolution(capsys):
    code, _, _ = run(capsys, "render", "--preset", "g4", "--res", "wide")
    assert code == 2


def test_render_bad_config(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, _ = run(capsys, "render", "--config", str(p))
    assert code == 2


def test_map_scale_alias(capsys):
    _, a = run_json(capsys, "map", "--n", "4", "--paper-scale")
    _, b = run_json(capsys, "map", "--n", "4", "--closed-form")
    assert a == b and a["closed_form"]
