from __future__ import annotations

import json

import pytest

from convisd.cli import main

TOY = ["--q", "2", "--n", "4", "--k", "2", "--memory", "2", "--te", "4", "--degree", "23", "--gamma", "2", "--eps", "1",
       "--W", "30", "--wlow", "2"]


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out if capsys is not None else None
    return code, out


def test_plan_csv_row(capsys):
    code, out = run(["plan", "--q", 2, "--N", 60, "--K", 36, "--s", 167, "--te", 140, "--eps", "0..6"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    row = dict(zip(header, lines[1 + 3].split(",")))
    assert row["epsilon"] == "3"
    assert row["probability"] == "0.780213064712423"
    assert row["wf_ratio"] == "18.356295878035"


def test_plan_target_and_json(capsys):
    code, out = run(["plan", "--q", 2, "--N", 60, "--K", 36, "--s", 167, "--te", 140, "--eps", "3", "--target", "0.98",
                     "--W", "430", "--json", "--weight-grid"], capsys)
    assert code == 0
    doc = json.loads(out)
    row = doc["rows"][0]
    assert row["recommended_W"] <= 430 and row["success_probability"] >= 0.98
    assert doc["weight_grid"]["q"] == 64 and len(doc["weight_grid"]["rows"]) == 15


def test_plan_writes_csv_files(tmp_path):
    code, _ = run(["plan", "--q", 2, "--N", 60, "--K", 36, "--s", 167, "--te", 140, "--weight-grid", "--out", tmp_path])
    assert code == 0
    assert (tmp_path / "probability.csv").read_text().startswith("epsilon,probability\n0,2.41848981004715e-39")
    assert (tmp_path / "wf_ratio.csv").exists() and (tmp_path / "weight_grid.csv").exists()


def test_usage_errors():
    assert main(["plan", "--N", "60", "--K", "36", "--s", "167", "--te", "140"]) == 2
    assert main(["gen", "--q", "2"]) == 2
    assert main(["gen", *TOY, "--pattern", "1,2"]) == 2
    assert main(["nonsense"]) == 2


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", *TOY, "--seed", "3", "--out", str(a)]) == 0
    assert main(["gen", *TOY, "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.secret.json").exists()
    assert "planted_error" not in json.loads(a.read_text())


def test_toy_profile_instance(tmp_path):
    path = tmp_path / "toy.json"
    assert main(["gen", "--profile", "bolkema-toy", "--seed", "1", "--benchmark", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert (doc["public_key"]["n"], doc["public_key"]["k"], doc["public_key"]["q"]) == (5, 3, 2)
    assert doc["spec"]["t_e"] == 14 and doc["spec"]["degree_bound"] == 199
    planted = doc["planted_error"]
    assert sum(1 for step in planted for x in step if x) == 14


def test_attack_then_verify(tmp_path):
    inst, rep = tmp_path / "i.json", tmp_path / "r.json"
    assert main(["gen", *TOY, "--seed", "5", "--benchmark", "--out", str(inst)]) == 0
    assert main(["attack", str(inst), "--seed", "1", "--out", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["found"] and report["verified"] and report["matches_planted"]
    assert {"config_hash", "instance_hash", "field", "seed", "timing"} <= set(report)
    assert main(["verify", str(inst), str(rep)]) == 0

    bad = tmp_path / "bad.json"
    err = report["error"]
    err[0][0] ^= 1
    bad.write_text(json.dumps(err))
    assert main(["verify", str(inst), str(bad)]) == 1


def test_cheat_mode_report(tmp_path):
    inst, rep = tmp_path / "i.json", tmp_path / "r.json"
    main(["gen", *TOY, "--seed", "5", "--benchmark", "--out", str(inst)])
    assert main(["attack", str(inst), "--cheat", "--out", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert len(report["estimate"]["positions"]) == report["s"]
    assert "bits" in report["timing"]


def test_cheat_without_planted_error(tmp_path):
    inst = tmp_path / "i.json"
    main(["gen", *TOY, "--seed", "5", "--out", str(inst)])
    assert main(["attack", str(inst), "--cheat"]) == 3


def test_budget_exceeded_exit_code(tmp_path):
    inst = tmp_path / "i.json"
    main(["gen", *TOY, "--te", "12", "--seed", "5", "--out", str(inst)])
    assert main(["attack", str(inst), "--eps", "0", "--W", "1", "--max-nodes", "1", "--out", str(tmp_path / "r.json")]) == 1


@pytest.mark.parametrize("text", ["{", "[]", '{"public_key": {}}', ""])
def test_malformed_instance(tmp_path, text):
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    assert main(["attack", str(bad), "--gamma", "1", "--eps", "1", "--W", "1"]) == 3
    assert main(["verify", str(bad), str(bad)]) == 3


def test_missing_instance_file(tmp_path):
    assert main(["attack", str(tmp_path / "nope.json"), "--gamma", "1", "--eps", "1", "--W", "1"]) == 3


def test_experiment_command(tmp_path):
    out = tmp_path / "x.json"
    assert main(["experiment", *TOY, "--seeds", "0..3", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert [r["seed"] for r in rep["seeds"]] == [0, 1, 2, 3]
    assert "discard_rate" in rep and "predicted_discard" in rep
