import json

import pytest

from eightvertex.cli import main
from eightvertex.exact import census_8v, z8v_exact
from eightvertex.graphs import gen_octahedron, parse_graph, serialize_graph


@pytest.fixture()
def oct_file(tmp_path):
    path = tmp_path / "oct.8vx"
    path.write_text(serialize_graph(gen_octahedron()))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_roundtrips_through_parse(tmp_path, capsys):
    out_path = tmp_path / "t.8vx"
    code, _, _ = run(capsys, "gen", "--type", "torus", "--rows", "2", "--cols", "4",
                     "--out", str(out_path))
    assert code == 0
    graph = parse_graph(out_path.read_text())
    assert graph.vertex_count == 8 and graph.edge_count == 16
    assert graph.bipartition is not None


def test_gen_to_stdout(capsys):
    code, out, _ = run(capsys, "gen", "--type", "k44")
    assert code == 0
    assert out.startswith("8vx-graph 1\n")


def test_exact_prints_integer(oct_file, capsys):
    code, out, _ = run(capsys, "exact", "--graph", oct_file, "--params", "1,1,1,1")
    assert code == 0
    assert out.strip() == "128"


def test_exact_prints_rational(oct_file, capsys):
    from eightvertex.exact import format_rational

    code, out, _ = run(capsys, "exact", "--graph", oct_file, "--params",
                       "1/3,1,1,1")
    assert code == 0
    expected = z8v_exact(gen_octahedron(), ("1/3", "1", "1", "1"))
    assert expected.denominator > 1
    assert out.strip() == format_rational(expected)


def test_exact_signed_params(oct_file, capsys):
    code, out, _ = run(capsys, "exact", "--graph", oct_file, "--params", "1,1,1,-1")
    assert code == 0
    assert out.strip() == "128"


def test_census_csv(oct_file, capsys):
    code, out, _ = run(capsys, "census", "--graph", oct_file)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n_A,n_B,n_C,n_D,count"
    census = census_8v(gen_octahedron())
    assert len(lines) - 1 == len(census.counts)
    total = sum(int(line.rsplit(",", 1)[1]) for line in lines[1:])
    assert total == 128


def test_group_table_row_order(capsys):
    code, out, _ = run(capsys, "group-table", "--class", "bipartite")
    assert code == 0
    labels = [line.split("\t")[0] for line in out.strip().splitlines()[1:]]
    assert labels == [
        "I", "MZ", "MZ^2", "MZ^3", "MZ^4", "MZ^5",
        "MHZ", "MZ*MHZ", "MZ^2*MHZ", "MZ^3*MHZ", "MZ^4*MHZ", "MZ^5*MHZ",
    ]
    code, out, _ = run(capsys, "group-table", "--class", "planar")
    labels = [line.split("\t")[0] for line in out.strip().splitlines()[1:]]
    assert labels == ["I", "MZ", "MZ^2", "MHZ", "MZ*MHZ", "MZ^2*MHZ"]


def test_plan_json(capsys):
    code, out, _ = run(capsys, "plan", "--class", "planar", "--params", "1,1,5,1")
    assert code == 0
    payload = json.loads(out)
    assert payload["element_word"] == "MZ^2"
    assert payload["image"] == ["3", "3", "3", "1"]
    assert payload["flips"] == []


def test_plan_failure_reports_diagnostics(capsys):
    code, out, _ = run(capsys, "plan", "--class", "planar", "--params", "12,1,1,1")
    assert code == 1
    payload = json.loads(out)
    assert payload["plan"] is None
    assert len(payload["diagnostics"]) == 6


def test_sample_emits_bitstrings(oct_file, capsys):
    code, out, _ = run(
        capsys, "sample", "--graph", oct_file, "--params", "1,1,1,2",
        "--seed", "7", "--samples", "5", "--burn-in", "10", "--thinning", "2",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5
    assert all(len(line) == 12 and set(line) <= {"0", "1"} for line in lines)
    code2, out2, _ = run(
        capsys, "sample", "--graph", oct_file, "--params", "1,1,1,2",
        "--seed", "7", "--samples", "5", "--burn-in", "10", "--thinning", "2",
    )
    assert out2 == out


def test_diagnose_chain_csv(oct_file, capsys):
    code, out, err = run(capsys, "diagnose-chain", "--graph", oct_file,
                         "--params", "1,1,1,1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "steps,tv"
    assert "detailed_balance=True" in err
    last_step, last_tv = lines[-1].split(",")
    assert float(last_tv) < 0.01


def test_estimate_json(oct_file, capsys):
    code, out, _ = run(
        capsys, "estimate", "--graph", oct_file, "--params", "1,1,5,1",
        "--class", "planar", "--eps", "0.05", "--delta", "0.25", "--seed", "3",
    )
    assert code == 0
    payload = json.loads(out)
    exact = float(z8v_exact(gen_octahedron(), (1, 1, 5, 1)))
    assert abs(payload["value"] / exact - 1) < 0.05
    assert payload["plan"]["element_word"] == "MZ^2"
    assert payload["stages"] > 0


def test_verify_sections(capsys):
    code, out, _ = run(capsys, "verify", "groups", "--seed", "1")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_usage_error_on_bad_params(oct_file, capsys):
    code, _, err = run(capsys, "exact", "--graph", oct_file, "--params", "1,2,3")
    assert code == 2
    assert "error" in err


def test_usage_error_on_missing_file(capsys):
    code, _, err = run(capsys, "exact", "--graph", "/nonexistent.8vx",
                       "--params", "1,1,1,1")
    assert code == 2


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["exact", "--graph", "x", "--params", "1,1,1,1", "--frobnicate"])
    assert exc.value.code == 2
