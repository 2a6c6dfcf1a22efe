import csv
import io
import json
import subprocess
import sys

import pytest

from cayleystat import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text, delim=","):
    return list(csv.DictReader(io.StringIO(text), delimiter=delim))


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "5", "--gen", "1", "--even")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "m,eigenvalue" and lines[1] == "0,2" and len(lines) == 6


@pytest.mark.parametrize("argv,msg", [
    (["spectrum", "--n", "4", "--gen", "1"], "modulus must be odd"),
    (["spectrum", "--n", "5", "--gen", "3"], "generator out of range"),
    (["sweep", "--k", "1", "--a", "0", "--b", "2", "--n-list", "5", "8"], "modulus must be odd"),
])
def test_validation_exit_code(capsys, argv, msg):
    code, _, err = run(capsys, *argv)
    assert code == 2 and msg in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "--n", "5"])
    assert exc.value.code == 2


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "prob", "--n", "201", "--k", "2", "--a", "-2", "--b", "2", "--budget", "1000")
    assert code == 4 and "budget" in err


def test_tolerance_exit_code(capsys, monkeypatch):
    from cayleystat import density
    monkeypatch.setattr(density, "MAX_PANELS", 1)
    code, _, err = run(capsys, "density", "--k", "3", "--c", "-1", "--d", "0.37", "--tolerance", "1e-14")
    assert code == 3


def test_density(capsys):
    _, out, _ = run(capsys, "density", "--k", "1", "--c", "-1", "--d", "1")
    assert float(rows(out)[0]["value"]) == 1.0
    _, out, _ = run(capsys, "density", "--k", "2", "--c", "-2", "--d", "0")
    assert abs(float(rows(out)[0]["value"]) - 0.5) <= 1e-8
    mc = ["density", "--k", "2", "--c", "-1", "--d", "1", "--method", "mc", "--samples", "200000", "--seed", "7"]
    _, a, _ = run(capsys, *mc)
    _, b, _ = run(capsys, *mc, "--threads", "3")
    assert a == b and rows(a)[0]["seed"] == "7"


def test_prob(capsys):
    _, out, _ = run(capsys, "prob", "--n", "5", "--k", "1", "--even", "--a", "0", "--b", "2")
    r = rows(out)[0]
    assert out.splitlines()[0] == ",".join(cli.SweepRecord.CSV_COLUMNS)
    assert float(r["probability"]) == 0.6 and float(r["reference_mass"]) == 0.5
    assert r["method"] == "exact/quadrature"
    _, out, _ = run(capsys, "prob", "--n", "9", "--k", "1", "--a", "0", "--b", "2")
    assert float(rows(out)[0]["probability"]) == 0.5
    _, out, _ = run(capsys, "prob", "--n", "9", "--k", "2", "--a", "-4", "--b", "4")
    assert float(rows(out)[0]["probability"]) == 1.0


def test_prob_both_and_odd(capsys):
    _, out, _ = run(capsys, "prob", "--n", "45", "--k", "2", "--odd", "--a", "-1", "--b", "3", "--path", "both")
    r = rows(out)[0]
    assert r["r"] == "5" and r["c"] == "-1" and r["d"] == "1"
    assert float(r["deviation"]) <= float(r["deviation_budget"])


def test_sweep_cache_and_slope(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CAYLEY_CACHE_DIR", str(tmp_path / "env"))
    argv = ["sweep", "--k", "1", "--a", "0", "--b", "2", "--n-list", "5", "9", "21", "45", "101"]
    _, first, _ = run(capsys, *argv)
    cached = list((tmp_path / "env").glob("*.json"))
    assert len(cached) == 5
    _, second, _ = run(capsys, *argv)
    assert first == second
    last = rows(first)[-1]
    assert last["n"] == "slope" and float(last["abs_error"]) < -0.8
    # the flag wins over the environment
    run(capsys, *argv, "--cache-dir", str(tmp_path / "flag"))
    assert len(list((tmp_path / "flag").glob("*.json"))) == 5


def test_cache_rejects_other_schema(tmp_path):
    cache = cli.Cache(str(tmp_path))
    key = cli.cache_key("sweep", n=5, k=1)
    cache.put(key, {"n": 5})
    assert cache.get(key) == {"n": 5}
    path = next(tmp_path.glob("*.json"))
    entry = json.loads(path.read_text())
    entry["schema_version"] = cli.SCHEMA_VERSION + 1
    path.write_text(json.dumps(entry))
    assert cache.get(key) is None


def test_cache_key_changes_with_every_parameter():
    base = dict(n=5, k=1, odd=False, interval=[0.0, 2.0], method="exact/quadrature", tolerance=1e-8, seed=0)
    keys = {cli.cache_key("sweep", **base)}
    for name, other in [("n", 7), ("k", 2), ("odd", True), ("interval", [0.0, 1.0]),
                        ("tolerance", 1e-9), ("seed", 1), ("method", "fast/quadrature")]:
        keys.add(cli.cache_key("sweep", **{**base, name: other}))
    assert len(keys) == 8
    assert cli.cache_key("sweep", **base) == cli.cache_key("sweep", **dict(reversed(base.items())))


def test_sweep_range_and_json(capsys, tmp_path):
    _, out, _ = run(capsys, "sweep", "--k", "1", "--a", "0", "--b", "2", "--n-min", "5", "--n-max", "15",
                    "--format", "json", "--no-cache")
    doc = json.loads(out)
    assert [r["n"] for r in doc["records"]] == [5, 7, 9, 11, 13, 15, "slope"]
    assert doc["meta"]["schema_version"] == cli.SCHEMA_VERSION and "wall_time" not in doc["meta"]
    _, out, _ = run(capsys, "sweep", "--k", "1", "--a", "0", "--b", "2", "--n-list", "5",
                    "--format", "json", "--no-cache", "--timing")
    assert "wall_time" in json.loads(out)["meta"]


def test_sweep_output_is_thread_independent(capsys, tmp_path):
    outs = []
    for threads in ("1", "8"):
        path = tmp_path / f"t{threads}.csv"
        run(capsys, "sweep", "--k", "2", "--a", "-2", "--b", "2", "--n-list", "9", "21", "45", "63",
            "--threads", threads, "--no-cache", "--output", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_histogram(capsys):
    _, out, _ = run(capsys, "histogram", "--n", "5", "--k", "1", "--bins", "4")
    table = rows(out, "\t")
    assert list(table[0]) == ["bin_lo", "bin_hi", "empirical_frequency", "predicted_mass"]
    freq = [float(r["empirical_frequency"]) for r in table]
    assert freq == pytest.approx([0.4, 0, 0.4, 0.2], abs=1e-15)
    assert abs(sum(freq) - 1) <= 1e-12
    assert abs(sum(float(r["predicted_mass"]) for r in table) - 1) <= 1e-8


def test_ihara(capsys):
    _, out, _ = run(capsys, "ihara", "zeta", "--n", "5", "--gen", "1")
    coeffs = [float(r["coefficient"]) for r in rows(out)]
    assert coeffs == pytest.approx([1, 0, 0, 0, 0, -2, 0, 0, 0, 0, 1], abs=1e-9)
    _, out, _ = run(capsys, "ihara", "poles", "--n", "7", "--gen", "1", "2", "--odd")
    assert len(rows(out)) == 7
    code, _, err = run(capsys, "ihara", "poles", "--n", "7")
    assert code == 2


def test_verify_stats_prints_audit_table(capsys):
    code, out, _ = run(capsys, "verify", "stats")
    assert code == 0
    assert "slice_lift 15 1 3 3 7 4 3" in out


def test_verify_density(capsys):
    code, out, _ = run(capsys, "verify", "density")
    assert code == 0 and "normalization k=4" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cayleystat", "spectrum", "--n", "3", "--gen", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[1] == "0,2"
