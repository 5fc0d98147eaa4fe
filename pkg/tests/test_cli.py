import json

import pytest

from anadisk.cli import OUT_ENV, config_hash, main

POLY_Z = {"type": "poly", "coeffs": [[[0, 0], [1, 0]]]}
POLY_2Z = {"type": "poly", "coeffs": [[[0, 0], [2, 0]]]}
GLUE = {"schema_version": 1, "seed": 3,
        "glue": {"f": POLY_Z, "g": POLY_2Z, "alpha": 0.5, "r_list": [0.1, 0.01], "n": 4096}}


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_no_command_is_usage(capsys):
    assert main([]) == 2


def test_empty_config_is_usage(tmp_path, capsys):
    assert main(["run", write(tmp_path, {})]) == 2
    assert "usage" in capsys.readouterr().err


def test_invalid_json_reports_line(tmp_path, capsys):
    assert main(["run", write(tmp_path, '{\n "seed": 1,\n oops\n}')]) == 2
    assert "line 3" in capsys.readouterr().err


def test_unknown_field_named(tmp_path, capsys):
    cfg = {"glue": {"f": POLY_Z, "g": POLY_2Z, "bogus": 1}}
    assert main(["run", write(tmp_path, cfg)]) == 2
    assert "glue.bogus" in capsys.readouterr().err


def test_module_error_exit_1(tmp_path, capsys):
    cfg = {"glue": {"f": POLY_Z, "g": POLY_2Z, "ambient_radius": 0.5, "r_list": [0.1], "n": 1024}}
    assert main(["glue", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "containment" and err["radius"] == 0.1


def test_glue_artifacts_and_determinism(tmp_path):
    cfg = write(tmp_path, GLUE)
    assert main(["run", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["run", cfg, "--out", str(tmp_path / "b"), "--threads", "1"]) == 0
    for name in ("glue_profile.csv", "glue_profile.svg", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["schema_version"] == 1 and man["config_hash"] == config_hash(man["config"])
    assert {a["path"] for a in man["artifacts"]} == {"glue_profile.csv", "glue_profile.svg"}


def test_flags_override_and_manifest_regenerates(tmp_path):
    cfg = write(tmp_path, GLUE)
    assert main(["run", cfg, "--seed", "11", "--out", str(tmp_path / "a")]) == 0
    man_path = tmp_path / "a" / "manifest.json"
    man = json.loads(man_path.read_text())
    assert man["config"]["seed"] == 11
    # the manifest alone is a valid config and reproduces every artifact
    assert main(["run", str(man_path), "--out", str(tmp_path / "b")]) == 0
    again = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert again["artifacts"] == man["artifacts"] and again["config_hash"] == man["config_hash"]


def test_report_verifies_hashes(tmp_path):
    assert main(["run", write(tmp_path, GLUE), "--out", str(tmp_path / "a")]) == 0
    man = str(tmp_path / "a" / "manifest.json")
    assert main(["report", man, "--out", str(tmp_path / "r")]) == 0
    rep = json.loads((tmp_path / "r" / "report.json").read_text())
    assert rep["all_ok"] and rep["config_hash_ok"]
    (tmp_path / "a" / "glue_profile.csv").write_text("tampered\n")
    assert main(["report", man, "--out", str(tmp_path / "r2")]) == 0
    assert not json.loads((tmp_path / "r2" / "report.json").read_text())["all_ok"]


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env_out"))
    assert main(["glue", write(tmp_path, GLUE)]) == 0
    assert (tmp_path / "env_out" / "manifest.json").is_file()


def test_every_json_artifact_is_versioned(tmp_path):
    cfg = {
        "seed": 1,
        "measure": {"maps": [POLY_Z], "probes": 10, "grid_n": 1024},
        "hull": {"K": {"kind": "points", "points": [0, 1]}, "points": [0.5], "degrees": [1], "restarts": 1},
        "leaf": {"leaf": {"kind": "torus_leaf", "J": 3}, "queries": [{"z": [0.3, 0], "r": 0.1}],
                 "walks": 200, "per_member": 64},
        "envelope": {"function": {"kind": "norm_power", "p": 2}, "points": [0.2], "degrees": [1],
                     "restarts": 1, "grid_n": 256},
    }
    out = tmp_path / "o"
    assert main(["run", write(tmp_path, cfg), "--out", str(out)]) == 0
    assert (out / "leaf_members.json").is_file()
    for p in out.glob("*.json"):
        assert json.loads(p.read_text())["schema_version"] == 1, p.name


@pytest.mark.parametrize("bad,field", [
    ({"seed": -1, "glue": {}}, "seed"),
    ({"schema_version": 9, "glue": {}}, "schema_version"),
    ({"hull": {"K": {"kind": "blob"}, "points": [0]}}, "hull.K.kind"),
    ({"leaf": {"leaf": {"kind": "torus_leaf", "J": 3}, "queries": [{"z": [1, 2, 3], "r": 0.1}]}},
     "leaf.queries[0].z"),
])
def test_field_diagnostics(tmp_path, capsys, bad, field):
    assert main(["run", write(tmp_path, bad), "--out", str(tmp_path / "o")]) == 2
    assert field in capsys.readouterr().err
