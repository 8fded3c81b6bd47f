import io
import json

import pytest

from cobordism.classifying import RingPresentation, ring_BGL, ring_BSL, ring_BT
import cobordism.cli as cli
from cobordism.cli import run
from cobordism.intlattice import LatticeSizeError
from cobordism.lazard import LazardBasisTable


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run(list(argv), out, err)
    return status, out.getvalue(), err.getvalue()


def test_lazard_ranks(cache_env):
    status, out, _ = call("lazard", "--max-codegree", "4")
    assert status == 0
    doc = json.loads(out)
    assert doc["version"] == 1
    assert doc["result"]["ranks"] == [1, 1, 2, 3, 5]
    assert [p["rank"] for p in doc["result"]["graded_pieces"]] == [1, 1, 2, 3, 5]
    assert (cache_env / "lazard_basis_4.json").exists()


def test_lazard_text(cache_env):
    status, out, _ = call("lazard", "--max-codegree", "2", "--format", "text")
    assert status == 0
    assert "a11" in out and "a12" in out


def test_fgl_text(cache_env):
    status, out, _ = call("fgl", "--order", "2")
    assert status == 0
    assert out == "F(u,v) = u + v + a11*u*v\n"


def test_fgl_extras(cache_env):
    status, out, _ = call("fgl", "--order", "3", "--law", "multiplicative", "--inverse",
                          "--n-series", "3", "--format", "json")
    assert status == 0
    res = json.loads(out)["result"]
    assert res["expansion"] == "u + v - beta*u*v"
    assert res["inverse"] == "-u - beta*u^2 - beta^2*u^3"
    assert res["n_series"]["series"] == "3*u - 3*beta*u^2 + beta^2*u^3"


def test_fgl_legend(cache_env):
    status, out, _ = call("fgl", "--order", "4", "--format", "json")
    assert status == 0
    res = json.loads(out)["result"]
    assert "x3_0" in res["legend"]


def test_ring_sl_chow(cache_env):
    status, out, _ = call("ring", "--group", "sl", "--rank", "2", "--t-degree", "3",
                          "--specialize", "chow")
    assert status == 0
    res = json.loads(out)["result"]
    assert [g["name"] for g in res["generators"]] == ["gamma2"]
    assert res["relations"][0]["series"] == "gamma1"
    assert [p["rank"] for p in res["graded_pieces"]] == [1, 0, 1, 0]


@pytest.mark.parametrize("group", ["torus", "gl", "sl"])
def test_ring_json_round_trip(cache_env, group, table):
    status, out, _ = call("ring", "--group", group, "--rank", "2", "--t-degree", "3",
                          "--degree", "-1", "--degree", "1", "--degree", "2")
    assert status == 0
    res = json.loads(out)["result"]
    cached = LazardBasisTable.load(cache_env / "lazard_basis_4.json")
    pres = RingPresentation.from_json(res, cached.ring)
    res.pop("legend", None)
    assert pres.to_json() == res
    build = {"torus": ring_BT, "gl": ring_BGL, "sl": ring_BSL}[group]
    assert pres == build(2, 3, cached, [-1, 1, 2])


def test_invariants(cache_env):
    status, out, _ = call("invariants", "--rank", "2", "--t-degree", "3", "--compare-gl")
    assert status == 0
    res = json.loads(out)["result"]
    assert res["rational_equal"] and res["integral_equal"]
    first = next(s for s in res["slices"] if s["t_degree"] == 1 and s["codegree"] == 0)
    assert first["basis"] == ["t1 + t2"]


def test_deterministic_output(cache_env):
    a = call("ring", "--group", "gl", "--rank", "2", "--t-degree", "4")[1]
    b = call("ring", "--group", "gl", "--rank", "2", "--t-degree", "4")[1]
    c = call("ring", "--group", "gl", "--rank", "2", "--t-degree", "4", "--rebuild-cache")[1]
    assert a == b == c


def test_flag_beats_env(cache_env, tmp_path):
    flag_dir = tmp_path / "flagged"
    call("lazard", "--max-codegree", "3", "--cache-dir", str(flag_dir))
    assert (flag_dir / "lazard_basis_3.json").exists()
    assert not (cache_env / "lazard_basis_3.json").exists()


def test_corrupt_cache(cache_env):
    cache_env.mkdir(parents=True)
    (cache_env / "lazard_basis_3.json").write_text('{"version": 1}')
    status, out, err = call("lazard", "--max-codegree", "3")
    assert status == 3 and out == ""
    assert json.loads(err)["error"]["type"] == "cache-corruption"
    status, out, _ = call("lazard", "--max-codegree", "3", "--rebuild-cache")
    assert status == 0
    assert json.loads(out)["result"]["ranks"] == [1, 1, 2, 3]


def test_flag_validation(cache_env):
    with pytest.raises(SystemExit) as exc:
        call("lazard", "--max-codegree", "-1")
    assert exc.value.code == 2
    status, _, err = call("check", "--criteria", "12")
    assert status == 2 and "criteria" in err


def test_compute_error(cache_env, monkeypatch):
    def refuse(n):
        raise LatticeSizeError("budget exceeded")

    monkeypatch.setattr(cli, "build_lazard_basis", refuse)
    status, out, err = call("lazard", "--max-codegree", "5")
    assert status == 4 and out == ""
    assert json.loads(err)["error"] == {"type": "LatticeSizeError", "message": "budget exceeded"}


def test_check_subset(cache_env):
    status, out, _ = call("check", "--criteria", "2,5")
    assert status == 0
    doc = json.loads(out)
    assert doc["result"]["passed"]
    assert [c["id"] for c in doc["result"]["criteria"]] == [2, 5]
