import csv
import io
import json
import math

import pytest

from orbitsum import cli, lab
from orbitsum.fourier import dft_full, max_nonzero_ratio
from orbitsum.lab import CSV_FIELDS, InstanceConfig, gen_instance, load_configs, run_sweep, verify_all
from orbitsum.reports import FAIL, PASS, UNMET, CheckReport


def test_quadratic_residue_instance():
    inst = gen_instance(InstanceConfig(7, 1, "quadratic-residue"))
    assert inst.group.codes.tolist() == [1, 2, 4]
    assert inst.orbit.points.codes.tolist() == [1, 2, 4]
    assert inst.profile.beta_eff == 1.0


def test_unipotent_instance():
    inst = gen_instance(InstanceConfig(11, 2, "unipotent-counterexample"))
    assert {tuple(x) for x in inst.orbit.points.points().tolist()} == {(1, t) for t in range(11)}
    assert inst.profile.beta_eff == 0


def test_diagonal_torus_instance():
    inst = gen_instance(InstanceConfig(5, 2, "diagonal-torus", v=(1, 1)))
    pts = {tuple(x) for x in inst.orbit.points.points().tolist()}
    assert pts == {(a, pow(a, -1, 5)) for a in range(1, 5)}


def test_config_validation():
    with pytest.raises(ValueError):
        InstanceConfig(7, 2, "quadratic-residue")
    with pytest.raises(ValueError):
        InstanceConfig(7, 1, "unipotent-counterexample")
    with pytest.raises(ValueError):
        InstanceConfig(7, 1, "nonsense")
    with pytest.raises(ValueError):
        InstanceConfig(7, 1, "explicit-generators")
    with pytest.raises(ValueError):
        InstanceConfig(7, 2, "cyclic-random", v=(1,))


def test_cyclic_random_reproducible():
    a = gen_instance(InstanceConfig(31, 2, "cyclic-random", seed=12345))
    b = gen_instance(InstanceConfig(31, 2, "cyclic-random", seed=12345))
    assert a.group == b.group and a.orbit.points == b.orbit.points and a.profile == b.profile
    c = gen_instance(InstanceConfig(31, 2, "cyclic-random", seed=12346))
    assert c.group != a.group or c.orbit.points != a.orbit.points


def test_battery_qr7_all_pass():
    reps = verify_all(gen_instance(InstanceConfig(7, 1, "quadratic-residue", exact=True)))
    assert set(reps) == set(lab.CHECKS)
    assert all(r.verdict == PASS for r in reps.values()), {k: r.verdict for k, r in reps.items()}


def test_battery_unipotent():
    inst = gen_instance(InstanceConfig(11, 2, "unipotent-counterexample"))
    reps = verify_all(inst)
    assert reps["trend"].verdict == UNMET
    assert max_nonzero_ratio(dft_full(inst.orbit.points)) == pytest.approx(1.0, abs=1e-12)
    assert not any(r.verdict == FAIL for r in reps.values())


def test_battery_trivial_group():
    cfg = InstanceConfig(5, 2, "explicit-generators", gens=(((1, 0), (0, 1)),), v=(1, 2))
    reps = verify_all(gen_instance(cfg))
    assert not any(r.verdict == FAIL for r in reps.values())
    assert reps["trend"].verdict == UNMET  # a single point lies in a hyperplane


def test_resource_failure_is_local(monkeypatch):
    monkeypatch.setenv("ORBITSUM_CAP_PAIRS", "3")
    reps = verify_all(gen_instance(InstanceConfig(7, 1, "quadratic-residue")))
    assert reps["parseval"].verdict == PASS
    assert "inconclusive" in {r.verdict for r in reps.values()}


def test_empty_sweep():
    res = run_sweep([])
    assert res.to_csv() == ",".join(CSV_FIELDS) + "\n"
    assert res.exit_code == 0


def test_sweep_rows_sorted_and_formatted():
    cfgs = [InstanceConfig(p, 1, "quadratic-residue") for p in (19, 7, 11)]
    res = run_sweep(cfgs)
    rows = list(csv.DictReader(io.StringIO(res.to_csv())))
    assert [r["p"] for r in rows] == ["7", "11", "19"]
    for r in rows:
        p = int(r["p"])
        assert float(r["max_nonzero_ratio"]) == pytest.approx(math.sqrt(p + 1) / (p - 1), abs=1e-9)
        assert r["timing"] == "" and r["error"] == ""
    doc = json.loads(res.to_json())
    assert doc["schema_version"] == 1 and doc["fields"] == list(CSV_FIELDS)


def test_sweep_error_column():
    cfg = InstanceConfig(5, 2, "explicit-generators", gens=(((1, 2), (2, 4)),))
    res = run_sweep([cfg])
    assert res.rows[0]["error"].startswith("ValueError") and "not invertible" in res.rows[0]["error"]
    assert res.exit_code == 0


def test_exit_code_tracks_failures(monkeypatch):
    real = lab.verify_all

    def broken(inst, *a, **k):
        out = real(inst, *a, **k)
        out["parseval"] = CheckReport("parseval", FAIL)
        return out

    monkeypatch.setattr(lab, "verify_all", broken)
    assert run_sweep([InstanceConfig(7, 1, "quadratic-residue")]).exit_code == 1


def test_load_configs_expands(tmp_path):
    doc = {
        "schema_version": 1,
        "defaults": {"d": 2, "family": "cyclic-random"},
        "instances": [{"p": [5, 7], "seed": [0, 1]}, {"p": 7, "d": 1, "family": "quadratic-residue", "caps": {"pairs": 100}}],
    }
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    cfgs = load_configs(str(path))
    assert len(cfgs) == 5 and cfgs[-1].caps == (("pairs", 100),)
    with pytest.raises(ValueError):
        load_configs(json.dumps({"schema_version": 99}))


def test_cli_subcommands(capsys):
    assert cli.main(["orbit", "--p", "7"]) == 0
    assert "|I| = 3" in capsys.readouterr().out
    assert cli.main(["profile", "--p", "5", "--d", "2", "--family", "diagonal-torus", "--out", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["max_hyperplane_hit"] == 2
    assert cli.main(["spectrum", "--p", "7", "--alpha", "0.4,0.5", "--out", "json"]) == 0
    sizes = [s["size"] for s in json.loads(capsys.readouterr().out)["spectra"]]
    assert sizes == [7, 1]
    assert cli.main(["growth", "--p", "7", "--alpha", "0.4"]) == 0
    assert "covering_K = 1" in capsys.readouterr().out
    assert cli.main(["iterate", "--p", "11", "--eps-prime", "0.5", "--out", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["J"] == 4
    assert cli.main(["verify", "spec-difference", "--p", "7", "--exact"]) == 0
    assert "pass" in capsys.readouterr().out
    gens = json.dumps([[[0, 4], [1, 0]]])
    assert cli.main(["orbit", "--p", "5", "--d", "2", "--gens", gens, "--v", "1,0", "--out", "csv"]) == 0
    head, row = capsys.readouterr().out.splitlines()
    assert dict(zip(head.split(","), row.split(","))) == {"H_order": "4", "I_size": "4", "d": "2", "p": "5"}


def test_cli_sweep_and_caps(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ORBITSUM_CAP_POINTS", str(2**26))  # restored after --cap rewrites it
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--p", "7,11", "--family", "quadratic-residue", "--output", str(out)]) == 0
    assert out.read_text().count("\n") == 3
    assert cli.main(["sweep"]) == 0
    assert capsys.readouterr().out == ",".join(CSV_FIELDS) + "\n"
    assert cli.main(["spectrum", "--p", "101", "--d", "2", "--family", "unipotent-counterexample", "--cap", "points=100"]) == 2
