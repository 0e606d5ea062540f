import json
import subprocess
import sys
from pathlib import Path

import pytest

from altcubing import add_kink, parse_pd
from altcubing.catalog import entry, names
from altcubing.cli import FAILED, OK, PARSE_ERROR, PRECONDITION, main

from conftest import CATALOG, TREFOIL

GOLDEN = Path(__file__).parent / "golden"

ORACLE = {"4_1": 2.0298832128, "L5a1": 3.6638623767, "L6a4": 7.3277247534}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path):
    d = parse_pd(entry("4_1").pd_text)
    paths = {
        "trefoil": tmp_path / "trefoil.pd",
        "garbage": tmp_path / "garbage.pd",
        "kinked": tmp_path / "kinked.pd",
    }
    paths["trefoil"].write_text(TREFOIL)
    paths["garbage"].write_text("this is not a diagram\n")
    paths["kinked"].write_text(add_kink(d, d.arcs[0]))
    return paths


# --- check -----------------------------------------------------------------------

@pytest.mark.parametrize("name", CATALOG)
def test_check_catalog(capsys, catalog_dir, name):
    code, out = run_json(capsys, "check", catalog_dir / f"{name}.pd")
    assert code == OK
    assert out["crossings"] == parse_pd(entry(name).pd_text).crossing_count


def test_check_failures(capsys, files):
    code, out = run_json(capsys, "check", files["trefoil"])
    assert code == FAILED and out["crossing_count_ok"] is False
    code, _, err = run(capsys, "check", files["garbage"])
    assert code == PARSE_ERROR and "MalformedInput" in err
    code, _, _ = run(capsys, "check", files["garbage"].parent / "missing.pd")
    assert code == PARSE_ERROR


# --- npc / edges -----------------------------------------------------------------

def test_npc(capsys, catalog_dir, files):
    assert run(capsys, "npc", catalog_dir / "4_1.pd")[0] == OK
    assert run(capsys, "npc", catalog_dir / "L6a4.pd")[0] == OK
    code, out = run_json(capsys, "npc", files["kinked"])
    assert code == PRECONDITION and out["validation"]["reduced"] is False
    code, out = run_json(capsys, "npc", files["kinked"], "--force")
    assert code == FAILED
    assert out["npc"] is False and out["failures"]
    assert {"vertex", "kind", "vertices"} <= set(out["failures"][0])


def test_edges(capsys, catalog_dir, files):
    assert run(capsys, "edges", catalog_dir / "4_1.pd")[0] == OK
    assert run(capsys, "edges", catalog_dir / "L5a1.pd")[0] == OK
    assert run(capsys, "edges", files["kinked"], "--force")[0] == PRECONDITION


def test_edges_injected_delta(capsys, catalog_dir):
    # a delta path through a region next to X_1 backtracks at P+
    code, out = run_json(capsys, "edges", catalog_dir / "4_1.pd", "--inject-delta", 1)
    assert code == FAILED and out["essential"] is False
    bad = [e for e in out["families"]["delta"] if not e["local_geodesic"]]
    assert bad and bad[0]["certificate"]["vertex"] in ("P+", "P-")


def test_bad_basepoint(capsys, catalog_dir):
    assert run(capsys, "npc", catalog_dir / "4_1.pd", "--basepoint", 2)[0] == PRECONDITION
    assert run(capsys, "npc", catalog_dir / "4_1.pd", "--basepoint", 3)[0] == OK


# --- golden JSON -----------------------------------------------------------------

@pytest.mark.parametrize("command, name", [
    ("check", "4_1"), ("npc", "4_1"), ("edges", "4_1"), ("npc", "L6a4")])
def test_golden(capsys, catalog_dir, command, name):
    _, out = run_json(capsys, command, catalog_dir / f"{name}.pd")
    out.pop("path", None)
    assert out == json.loads((GOLDEN / f"{command}_{name}.json").read_text())


# --- solve -----------------------------------------------------------------------

@pytest.mark.parametrize("name", list(ORACLE))
def test_solve_oracles(capsys, catalog_dir, name):
    code, out = run_json(capsys, "solve", catalog_dir / f"{name}.pd")
    assert code == OK
    assert out["volume"] == pytest.approx(ORACLE[name], abs=1e-9)
    assert set(out) == {"crossings", "gamma_size", "lambda", "z", "residual", "v_hat",
                        "volume", "cs_mod_pi2", "restarts_used", "seed"}
    assert out["seed"] == 0


def test_solve_text_and_flags(capsys, catalog_dir):
    code, out, _ = run(capsys, "solve", catalog_dir / "4_1.pd", "--seed", 5, "--restarts", 3,
                       "--tol", 1e-11, "--skip-checks")
    assert code == OK
    assert "volume: 2.029883212" in out and "seed: 5" in out


def test_solve_preconditions(capsys, files):
    assert run(capsys, "solve", files["kinked"])[0] == PRECONDITION
    # the trefoil passes the curvature checks but is too small to collapse
    assert run(capsys, "solve", files["trefoil"], "--force")[0] == PRECONDITION
    assert run(capsys, "solve", files["garbage"])[0] == PARSE_ERROR


def test_solve_no_convergence(capsys, catalog_dir, monkeypatch):
    import altcubing.cli as cli
    from altcubing.potential import SolverOptions

    monkeypatch.setattr(cli, "SolverOptions",
                        lambda **kw: SolverOptions(max_iter=1, **kw))
    code, out = run_json(capsys, "solve", catalog_dir / "L6a4.pd", "--restarts", 1)
    assert code == FAILED and out["seed"] == 0


# --- batch -----------------------------------------------------------------------

def test_batch_catalog(capsys, catalog_dir):
    code, out = run_json(capsys, "batch", catalog_dir)
    assert code == OK
    rows = out["rows"]
    assert [r["name"] for r in rows] == sorted(names())
    for r in rows:
        assert set(r) == {"name", "c", "npc", "essential", "gamma", "volume", "cs",
                          "residual", "ok"}
        assert r["ok"] and r["npc"] and r["essential"] and r["residual"] < 1e-10
        if r["name"] in ORACLE:
            assert r["volume"] == pytest.approx(ORACLE[r["name"]], abs=1e-9)


def test_batch_empty(capsys, tmp_path):
    code, out, _ = run(capsys, "batch", tmp_path)
    assert code == OK and "(no diagrams)" in out and "seed: 0" in out
    code, out = run_json(capsys, "batch", tmp_path)
    assert code == OK and out["rows"] == []


def test_batch_isolates_errors(capsys, tmp_path, catalog_dir):
    for name in ("4_1", "L5a1"):
        (tmp_path / f"{name}.pd").write_text((catalog_dir / f"{name}.pd").read_text())
    (tmp_path / "broken.pd").write_text("X 1 2 3\n")
    code, out = run_json(capsys, "batch", tmp_path)
    assert code != OK
    by_name = {r["name"]: r for r in out["rows"]}
    assert by_name["broken"]["code"] == PARSE_ERROR and not by_name["broken"]["ok"]
    assert by_name["4_1"]["ok"] and by_name["L5a1"]["ok"]


def test_batch_not_a_directory(capsys, catalog_dir):
    assert run(capsys, "batch", catalog_dir / "4_1.pd")[0] == PARSE_ERROR


def test_console_script(catalog_dir):
    res = subprocess.run([sys.executable, "-m", "altcubing.cli", "check",
                          str(catalog_dir / "4_1.pd")], capture_output=True, text=True)
    assert res.returncode == 0 and "alternating: True" in res.stdout
