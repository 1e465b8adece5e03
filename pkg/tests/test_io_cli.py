import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmsubdiv import DomainError, ElementSequence
from cmsubdiv.cli import main
from cmsubdiv.generators import GENERATORS, generate
from cmsubdiv.io import (BUNDLE_SCHEMA, CONFIG_SCHEMA, DATA_SCHEMAS, REPORT_SCHEMAS, decode,
                         dumps, encode, roundtrip, validate)
from cmsubdiv.spaces import DiscreteMeasure1D, FiniteCompactSet, HermitePair

SQUARE = {"space": "euclidean", "dim": 2, "closed": True,
          "points": [[0, 0], [1, 0], [1, 1], [0, 1]]}


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg, indent=1))
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


# --- serialization -------------------------------------------------------------------------

class TestRoundTrip:
    @pytest.mark.parametrize("generator,params", [
        ("random-walk", {"n": 5, "dim": 3}),
        ("sphere-points", {"n": 6}),
        ("circle-hermite", {"n": 7}),
        ("hermite-random", {"n": 6, "dim": 3}),
        ("point-cloud-tube", {"n": 4}),
        ("gaussian-mixture", {"n": 4, "atoms": 3}),
    ])
    def test_generated_documents(self, generator, params):
        doc, _ = generate(generator, 11, **params)
        text = dumps(doc)
        assert roundtrip(text) == text
        assert roundtrip(roundtrip(text)) == text

    @given(st.lists(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=2), min_size=1,
                    max_size=6), st.booleans())
    def test_points_arbitrary_floats(self, pts, closed):
        text = dumps({"space": "euclidean", "dim": 2, "closed": closed, "points": pts})
        assert roundtrip(text) == roundtrip(roundtrip(text))

    def test_decode_types(self):
        _, P = decode(generate("circle-hermite", 0, n=3)[0])
        assert isinstance(P[0], HermitePair) and P.closed
        _, P = decode(generate("point-cloud-tube", 0, n=2)[0])
        assert isinstance(P[0], FiniteCompactSet)
        _, P = decode(generate("gaussian-mixture", 0, n=2)[0])
        assert isinstance(P[0], DiscreteMeasure1D)

    def test_schemas_validate_documents(self):
        for gen, fmt in [("random-walk", "points"), ("circle-hermite", "hermite"),
                         ("point-cloud-tube", "sets"), ("gaussian-mixture", "measures")]:
            jsonschema.validate(generate(gen, 1)[0], DATA_SCHEMAS[fmt])
        for schema in [*DATA_SCHEMAS.values(), *REPORT_SCHEMAS.values(), CONFIG_SCHEMA,
                       BUNDLE_SCHEMA]:
            jsonschema.Draft202012Validator.check_schema(schema)

    def test_invalid_document(self):
        with pytest.raises(DomainError):
            decode({"space": "euclidean", "dim": 2, "points": "nope"})
        with pytest.raises(DomainError):
            validate({"levels": -1}, CONFIG_SCHEMA)

    def test_encode_sphere(self):
        P = ElementSequence([np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])])
        doc = encode("sphere", P)
        assert doc["space"] == "sphere" and doc["dim"] == 3


class TestGenerators:
    @pytest.mark.parametrize("generator", sorted(GENERATORS))
    def test_deterministic(self, generator):
        a, b = generate(generator, 2024), generate(generator, 2024)
        assert dumps(a[0]) == dumps(b[0]) and dumps(a[1]) == dumps(b[1])
        if generator != "helix-hermite":  # the helix sampler has no random component
            assert dumps(generate(generator, 2025)[0]) != dumps(a[0])

    def test_circle_tangents(self):
        doc, meta = generate("circle-hermite", 5, n=8)
        _, P = decode(doc)
        assert len(P) == 8 and meta["lipschitz"] == 1.0
        for x in P:
            assert abs(np.linalg.norm(x.p) - 1) <= 1e-12
            assert abs(np.dot(x.p, x.v)) <= 1e-12

    def test_measure_masses(self):
        _, P = decode(generate("gaussian-mixture", 9, atoms=3)[0])
        for m in P:
            assert abs(m.masses.sum() - 1) <= 1e-12

    def test_hermite_random_delta(self):
        from cmsubdiv import delta
        from cmsubdiv.spaces import HermiteSpace
        for d in (0.2, 0.05):
            _, P = decode(generate("hermite-random", 3, delta=d)[0])
            assert delta(P, HermiteSpace()) == pytest.approx(d, rel=1e-12)

    def test_hermite_domain_bounds(self):
        from cmsubdiv.analysis import hermite_gaps
        g = hermite_gaps(decode(generate("hermite-domain", 4, n=30, bound=0.5)[0])[1])
        assert g.max_gap < 0.5 and g.max_angle < 0.5

    def test_unknown(self):
        with pytest.raises(DomainError):
            generate("nope", 0)
        with pytest.raises(DomainError):
            generate("random-walk", 0, bogus=1)


# --- command line --------------------------------------------------------------------------

class TestCli:
    def test_square_bundle(self, tmp_path):
        cfg = write_config(tmp_path, {
            "space": {"id": "euclidean"}, "scheme": {"id": "elementary"},
            "data": {"inline": SQUARE}, "levels": 3,
            "analyses": [{"kind": "cauchy"}, {"kind": "contractivity", "params": {"L_max": 1}}],
            "output": {"dump_levels": True}})
        out = tmp_path / "out"
        assert run_cli("run", "--config", cfg, "--output", out) == 0
        bundle = json.loads((out / "bundle.json").read_text())
        jsonschema.validate(bundle, BUNDLE_SCHEMA)
        assert len(bundle["levels"][3]["data"]["points"]) == 32
        assert bundle["config_echo"] == cfg.read_text()
        assert bundle["reports"]["cauchy"]["distances"] == [0.0, 0.0, 0.0]
        for kind, rep in bundle["reports"].items():
            jsonschema.validate(rep, REPORT_SCHEMAS[kind])
        assert (out / "delta.csv").read_text().splitlines()[0] == "level,length,first_index,delta"
        assert (out / "cauchy.csv").exists() and (out / "runtime.json").exists()

    def test_bundle_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, {
            "space": {"id": "sphere"}, "scheme": {"id": "chaikin"},
            "data": {"generator": "sphere-points", "seed": 3, "params": {"n": 6}},
            "levels": 4, "analyses": [{"kind": "contractivity", "params": {"L_max": 2}},
                                      {"kind": "cauchy"}, {"kind": "displacement"}]})
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli("run", "--config", cfg, "--output", a) == 0
        assert run_cli("run", "--config", cfg, "--output", b) == 0
        assert (a / "bundle.json").read_bytes() == (b / "bundle.json").read_bytes()
        for name in ("delta.csv", "cauchy.csv", "contractivity.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_seed_override_changes_data(self, tmp_path):
        cfg = write_config(tmp_path, {
            "space": {"id": "euclidean"}, "scheme": {"id": "elementary"},
            "data": {"generator": "random-walk", "seed": 3}, "levels": 1})
        run_cli("subdivide", "--config", cfg, "--output", tmp_path / "a")
        run_cli("subdivide", "--config", cfg, "--output", tmp_path / "b", "--seed", 4)
        a = json.loads((tmp_path / "a" / "bundle.json").read_text())
        b = json.loads((tmp_path / "b" / "bundle.json").read_text())
        assert a["levels"][0]["data"] != b["levels"][0]["data"]
        assert b["data"]["seed"] == 4

    def test_unknown_scheme_exit_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"space": {"id": "euclidean"},
                                      "scheme": {"id": "butterfly"}, "data": {"inline": SQUARE}})
        assert run_cli("run", "--config", cfg, "--output", tmp_path) == 2
        assert "butterfly" in capsys.readouterr().err

    def test_invalid_config_exit_2(self, tmp_path):
        cfg = write_config(tmp_path, {"space": {"id": "euclidean"}, "data": {"inline": SQUARE}})
        assert run_cli("run", "--config", cfg, "--output", tmp_path) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run_cli("run", "--config", bad, "--output", tmp_path) == 2

    def test_format_mismatch_exit_2(self, tmp_path):
        cfg = write_config(tmp_path, {"space": {"id": "hermite"},
                                      "scheme": {"id": "hermite-bezier"},
                                      "data": {"inline": SQUARE}})
        assert run_cli("run", "--config", cfg, "--output", tmp_path) == 2

    def test_antipodal_exit_3(self, tmp_path, capsys):
        data = {"space": "sphere", "dim": 3, "closed": False,
                "points": [[1, 0, 0], [0, 0, 1], [0, 0, -1]]}
        cfg = write_config(tmp_path, {"space": {"id": "sphere"}, "scheme": {"id": "elementary"},
                                      "data": {"inline": data}, "levels": 2})
        assert run_cli("subdivide", "--config", cfg, "--output", tmp_path) == 3
        err = json.loads(capsys.readouterr().err)
        assert err["operation"] == "elementary_refine" and err["index"] == 1

    def test_seed_must_be_u64(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli("generate", "random-walk", "--seed", -1, "--output", tmp_path)
        assert exc.value.code == 2

    def test_generate_byte_identical(self, tmp_path):
        for d in ("a", "b"):
            assert run_cli("generate", "gaussian-mixture", "--seed", 7, "--param", "atoms=3",
                           "--output", tmp_path / d) == 0
        name = "gaussian-mixture-7.json"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        meta = json.loads((tmp_path / "a" / "gaussian-mixture-7.meta.json").read_text())
        assert meta["params"] == {"atoms": 3}

    def test_masks(self, capsys):
        assert run_cli("masks", "lane-riesenfeld", "--rounds", 2) == 0
        table = json.loads(capsys.readouterr().out)
        assert table["even"] == {"-1": 0.125, "0": 0.75, "1": 0.125}
        assert table["odd"] == {"0": 0.5, "1": 0.5}

    def test_schema_command(self, capsys):
        assert run_cli("schema", "config") == 0
        assert json.loads(capsys.readouterr().out) == json.loads(json.dumps(CONFIG_SCHEMA))

    def test_analyze_single(self, tmp_path):
        cfg = write_config(tmp_path, {"space": {"id": "euclidean"},
                                      "scheme": {"id": "chaikin"},
                                      "data": {"inline": SQUARE}, "levels": 3})
        assert run_cli("analyze", "locality", "--config", cfg, "--output", tmp_path / "o") == 0
        rep = json.loads((tmp_path / "o" / "bundle.json").read_text())["reports"]["locality"]
        assert rep["spread"] <= rep["bound"] == 2

    def test_hermite_proximity_config(self, tmp_path):
        cfg = write_config(tmp_path, {
            "space": {"id": "hermite"}, "scheme": {"id": "hermite-bezier"},
            "data": {"generator": "hermite-random", "seed": 1, "params": {"n": 10}},
            "levels": 2,
            "analyses": [{"kind": "proximity1",
                          "params": {"other": {"id": "hermite-naive"},
                                     "scales": [0.2, 0.1, 0.05, 0.025]}}]})
        assert run_cli("run", "--config", cfg, "--output", tmp_path / "o") == 0
        rep = json.loads((tmp_path / "o" / "bundle.json").read_text())["reports"]["proximity1"]
        assert rep["bound_ok"] and all(rep["bound_ok"])
        assert rep["bound_constant"] == pytest.approx(1 / (8 * math.cos(0.25) ** 2))

    def test_env_output_dir(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, {"space": {"id": "euclidean"},
                                      "scheme": {"id": "elementary"},
                                      "data": {"inline": SQUARE}, "levels": 1})
        monkeypatch.setenv("CMSUBDIV_OUTPUT_DIR", str(tmp_path / "env"))
        assert run_cli("subdivide", "--config", cfg) == 0
        assert (tmp_path / "env" / "bundle.json").exists()

    def test_module_entry_point(self, tmp_path):
        r = subprocess.run([sys.executable, "-m", "cmsubdiv", "masks", "chaikin"],
                           capture_output=True, text=True, check=True)
        assert json.loads(r.stdout)["mask"] == [0.25, 0.75, 0.75, 0.25]
