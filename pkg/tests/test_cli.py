import json

import pytest

from hyperact.cli import EXIT_BUDGET, EXIT_IO, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def line_file(tmp_path):
    p = tmp_path / "line.txt"
    p.write_text("".join(f"{i} {i + 1}\n" for i in range(11)))
    return p


@pytest.fixture
def cycle_file(tmp_path):
    p = tmp_path / "cycle.txt"
    p.write_text("".join(f"{i} {(i + 1) % 8}\n" for i in range(8)))
    return p


def test_rootsys_report(capsys):
    code, out, _ = run(capsys, "rootsys", "--system", "G2")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["subcommand"] == "rootsys"
    assert rep["config"]["system"] == "G2"
    assert len(rep["fingerprint"]) == 64


def test_steinberg_csv(capsys):
    code, out, _ = run(capsys, "steinberg", "--system", "A2", "--grid", "1", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "alpha,beta,i,j,root,N"


def test_logword(capsys):
    code, out, _ = run(capsys, "logword", "--system", "A2", "--root", "1,-1,0", "--n", "1024")
    assert code == EXIT_OK
    assert json.loads(out)["results"]["verified"] is True


def test_numring(capsys):
    code, out, _ = run(capsys, "numring", "--d", "2")
    assert code == EXIT_OK
    assert "16" in out


def test_delta_exact_and_sampled(capsys, cycle_file):
    code, out, _ = run(capsys, "delta", "--input", str(cycle_file), "--exact")
    assert code == EXIT_OK
    assert json.loads(out)["results"]["delta4"] == "2"
    code, _, err = run(capsys, "delta", "--input", str(cycle_file), "--samples", "100")
    assert code == EXIT_USAGE and "--seed" in err
    code, out, _ = run(capsys, "delta", "--input", str(cycle_file), "--samples", "2000", "--seed", "1")
    assert code == EXIT_OK and json.loads(out)["results"]["mode"] == "sampled"


def test_global_flags_before_or_after(capsys, cycle_file, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--workers", "1", "-o", str(a), "delta", "--input", str(cycle_file)]) == EXIT_OK
    assert main(["delta", "--input", str(cycle_file), "--workers", "4", "-o", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_timing_only_on_request(capsys, cycle_file):
    _, out, _ = run(capsys, "delta", "--input", str(cycle_file))
    assert "timing_seconds" not in out
    _, out, _ = run(capsys, "delta", "--input", str(cycle_file), "--timing")
    assert "timing_seconds" in json.loads(out)


def test_qi_identity(capsys, line_file, tmp_path):
    m = tmp_path / "map.txt"
    m.write_text("".join(f"{i} {i}\n" for i in range(12)))
    code, out, _ = run(capsys, "qi", "--source", str(line_file), "--target", str(line_file), "--map", str(m))
    assert code == EXIT_OK
    res = json.loads(out)["results"]
    assert res["K"] == "1" and res["C"] == "0"


def test_fiber(capsys):
    code, out, _ = run(capsys, "fiber", "--length", "12")
    assert code == EXIT_OK
    res = json.loads(out)["results"]
    assert res["iota"]["ok"] is True
    assert res["delta_A1_within_bound"] is True


def test_cayley_and_cone(capsys):
    code, out, _ = run(capsys, "cayley", "--modulus", "3", "--radius", "5", "--delta")
    assert code == EXIT_OK
    code, out, _ = run(capsys, "cone", "--modulus", "5", "--radius", "3", "--delta")
    assert code == EXIT_OK
    res = json.loads(out)["results"]
    assert res["vertices"] == "62"


def test_horoball_exp_profile(capsys, line_file):
    code, out, _ = run(capsys, "horoball", "--base", str(line_file), "--depth", "3", "--profile",
                       "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "depth,delta4"
    assert len(out.splitlines()) == 4


def test_horoball_orbit_inadmissible_needs_force(capsys, line_file):
    code, _, err = run(capsys, "horoball", "--base", str(line_file), "--family", "orbit", "--C1", "1",
                       "--depth", "3")
    assert code == EXIT_PRECONDITION and "exponential_growth" in err
    code, _, _ = run(capsys, "horoball", "--base", str(line_file), "--family", "orbit", "--C1", "1",
                     "--depth", "3", "--force")
    assert code == EXIT_OK


def test_horoball_custom_family_errors(capsys, line_file, tmp_path):
    fam = tmp_path / "fam.txt"
    fam.write_text("1 0: 0 1\n1 0 bad\n")
    code, _, err = run(capsys, "horoball", "--base", str(line_file), "--family", "custom",
                       "--family-file", str(fam), "--depth", "1")
    assert code == EXIT_PRECONDITION and "line 2" in err


def test_classify_and_pseudochar_presets(capsys):
    code, out, _ = run(capsys, "classify", "--preset", "line", "--N", "40")
    assert code == EXIT_OK
    assert json.loads(out)["results"]["label"] == "hyperbolic"
    code, out, _ = run(capsys, "pseudochar", "--preset", "cycle", "--N", "24")
    assert code == EXIT_OK
    assert json.loads(out)["results"]["consistent"] is True


def test_classify_action_file(capsys, tmp_path):
    spec = {"edges": [[i, (i + 1) % 6] for i in range(6)], "generators": [[(i + 1) % 6 for i in range(6)]],
            "ray": [0, 1, 2, 3], "tail": 1}
    p = tmp_path / "act.json"
    p.write_text(json.dumps(spec))
    code, out, _ = run(capsys, "classify", "--action", str(p), "--N", "12")
    assert code == EXIT_OK
    assert json.loads(out)["results"]["label"] == "elliptic"


def test_bgen(capsys):
    code, out, _ = run(capsys, "bgen", "--modulus", "5")
    assert code == EXIT_OK
    assert json.loads(out)["results"]["diameter"] == "4"


def test_budget_exit(capsys, monkeypatch):
    monkeypatch.setenv("HYPERACT_MAX_STATES", "10")
    code, _, _ = run(capsys, "bgen", "--modulus", "7")
    assert code == EXIT_BUDGET


@pytest.mark.parametrize("argv, code", [
    ([], EXIT_USAGE),
    (["nosuch"], EXIT_USAGE),
    (["rootsys"], EXIT_USAGE),
    (["rootsys", "--system", "E8"], EXIT_PRECONDITION),
    (["delta", "--input", "/nonexistent/file"], EXIT_IO),
    (["numring", "--d", "4"], EXIT_PRECONDITION),
    (["rootsys", "--system", "A2", "--format", "csv"], EXIT_USAGE),
    (["horoball", "--base", "/nonexistent", "--depth", "-1"], EXIT_USAGE),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_unwritable_output(capsys):
    assert run(capsys, "rootsys", "--system", "A2", "-o", "/nonexistent/dir/out.json")[0] == EXIT_IO
