import json
import pathlib

import pytest

import fullgroups as fg
from fullgroups.cli import main

from conftest import (
    make_e2,
    make_e_inf,
    make_gamma2_diagram,
    make_leveled_chain_graph,
    make_one_orbit,
    make_two_vertex_omega,
)

GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    out = {
        "e2": write("e2.graph", fg.graph_to_json(make_e2())),
        "einf": write("einf.graph", fg.graph_to_json(make_e_inf())),
        "one_orbit": write("oo.graph", fg.graph_to_json(make_one_orbit())),
        "two_vertex": write("tv.graph", fg.graph_to_json(make_two_vertex_omega())),
        "leveled": write("lev.graph", fg.graph_to_json(make_leveled_chain_graph())),
        "gamma2": write("g2.bratteli", fg.bratteli_to_json(make_gamma2_diagram())),
        "swap": write("swap.table", {"pieces": [
            {"mu": "v:a", "F": [], "lambda": "v:b"},
            {"mu": "v:b", "F": [], "lambda": "v:a"},
        ]}),
        "baker": write("baker.table", {"pieces": [
            {"mu": "v:a,a", "F": [], "lambda": "v:a"},
            {"mu": "v:a,b", "F": [], "lambda": "v:b,a"},
            {"mu": "v:b", "F": [], "lambda": "v:b,b"},
        ]}),
        "dir": tmp_path,
    }
    return out


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_one_orbit_report(self, files, capsys):
        code, out, err = run(capsys, "analyze", files["one_orbit"])
        assert code == 0
        rep = json.loads(out)
        assert rep["L"]["holds"] is True
        assert rep["cofinal"]["holds"] is False
        assert rep["minimal"]["holds"] is False

    def test_leveled(self, files, capsys):
        code, out, _ = run(capsys, "analyze", files["leveled"])
        assert code == 0
        assert json.loads(out)["L"]["holds"] is True


class TestValidate:
    def test_graph(self, files, capsys):
        assert run(capsys, "validate", files["e2"])[0] == 0

    def test_table(self, files, capsys):
        code, out, _ = run(capsys, "validate", files["swap"], "--kind", "table",
                           "--graph", files["e2"])
        assert code == 0

    def test_bratteli(self, files, capsys):
        assert run(capsys, "validate", files["gamma2"], "--kind", "bratteli")[0] == 0

    def test_bad_table_is_domain_error(self, files, tmp_path, capsys):
        bad = tmp_path / "bad.table"
        bad.write_text(json.dumps({"pieces": [
            {"mu": "v:a", "F": [], "lambda": "v:b"}]}))
        code, out, err = run(capsys, "validate", str(bad), "--kind", "table",
                             "--graph", files["e2"])
        assert code == 1
        assert json.loads(err)["error"]["code"] == "bad-table"


class TestTableCommands:
    def test_compose_swap_swap_is_identity(self, files, capsys):
        code, out, _ = run(capsys, "compose", files["swap"], files["swap"],
                           "--graph", files["e2"])
        assert code == 0
        assert json.loads(out) == {"pieces": []}

    def test_invert_roundtrip(self, files, capsys):
        code, out, _ = run(capsys, "invert", files["baker"], "--graph", files["e2"])
        assert code == 0
        pieces = json.loads(out)["pieces"]
        assert {"mu": "v:a", "F": [], "lambda": "v:a,a"} in pieces

    def test_apply(self, files, capsys):
        code, out, _ = run(capsys, "apply", files["baker"], "--graph", files["e2"],
                           "--point", "v:a / (b)")
        assert code == 0
        assert json.loads(out) == {"point": "v:a,a / (b)"}

    def test_apply_text_format(self, files, capsys):
        code, out, _ = run(capsys, "apply", files["baker"], "--graph", files["e2"],
                           "--point", "v:a / (b)", "--format", "text")
        assert code == 0
        assert out == "v:a,a / (b)\n"

    def test_embed_with_labeling_file(self, files, capsys, tmp_path):
        labfile = tmp_path / "lab.json"
        labfile.write_text(json.dumps({"edges": {"v": ["b", "a"]}}))
        code, out, _ = run(capsys, "embed", files["swap"], "--graph", files["e2"],
                           "--labeling", str(labfile))
        assert code == 0
        pieces = json.loads(out)["pieces"]
        assert {"mu": "v:a", "F": [], "lambda": "v:b"} in pieces

    def test_support(self, files, capsys):
        code, out, _ = run(capsys, "support", files["swap"], "--graph", files["e2"])
        assert code == 0
        assert json.loads(out) == [{"mu": "v:", "F": []}]

    def test_germ_eq(self, files, capsys):
        code, out, _ = run(capsys, "germ-eq", files["swap"], files["baker"],
                           "--graph", files["e2"])
        assert code == 0
        assert json.loads(out) == {"equal": False}

    def test_embed(self, files, capsys):
        code, out, _ = run(capsys, "embed", files["swap"], "--graph", files["e2"])
        assert code == 0
        assert len(json.loads(out)["pieces"]) == 2


class TestEmit:
    def test_einf_golden(self, files, capsys):
        code, out, _ = run(capsys, "emit", files["einf"], "--bound", "10")
        assert code == 0
        assert out == (GOLDEN / "emit_einf.txt").read_text()

    def test_two_vertex_golden(self, files, capsys):
        code, out, _ = run(capsys, "emit", files["two_vertex"], "--bound", "10")
        assert code == 0
        assert out == (GOLDEN / "emit_two_vertex.txt").read_text()

    def test_leveled_golden(self, files, capsys):
        code, out, _ = run(capsys, "emit", files["leveled"], "--bound", "6")
        assert code == 0
        assert out == (GOLDEN / "emit_leveled_f.txt").read_text()

    def test_emit_to_file_deterministic(self, files, capsys, tmp_path):
        out1 = tmp_path / "a.txt"
        out2 = tmp_path / "b.txt"
        assert run(capsys, "emit", files["two_vertex"], "--out", str(out1))[0] == 0
        assert run(capsys, "emit", files["two_vertex"], "--out", str(out2))[0] == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_emit_rejects_inadmissible(self, files, capsys, tmp_path):
        bad = tmp_path / "sink.graph"
        bad.write_text(json.dumps({"vertices": ["v", "s"], "edges": [
            {"id": "a", "src": "v", "rng": "s", "mult": "1"},
            {"id": "b", "src": "v", "rng": "v", "mult": "1"}]}))
        code, _, err = run(capsys, "emit", str(bad))
        assert code == 1
        assert json.loads(err)["error"]["code"] == "not-admissible"


class TestCkCheck:
    def test_einf(self, files, capsys):
        code, out, _ = run(capsys, "ck-check", files["einf"], "--bound", "5")
        assert code == 0
        assert json.loads(out) == {"ok": True, "failures": []}


class TestBratteli:
    def test_order(self, files, capsys):
        code, out, _ = run(capsys, "bratteli-order", files["gamma2"], "--level", "1")
        assert code == 0
        assert json.loads(out) == {"order": 2}

    def test_embed_element(self, files, capsys, tmp_path):
        b = make_gamma2_diagram()
        g = b.underlying_graph()
        el = next(e for e in b.gamma_elements(1) if not e.is_identity())
        images = {fg.format_path(g, p): fg.format_path(g, q)
                  for p, q in el.mapping.items() if p != q}
        elfile = tmp_path / "el.json"
        elfile.write_text(json.dumps({"level": 1, "images": images}))
        code, out, _ = run(capsys, "bratteli-embed", files["gamma2"],
                           "--element", str(elfile))
        assert code == 0
        vt = fg.table_from_json(fg.E2, json.loads(out))
        assert not fg.is_identity(vt)
        assert fg.is_identity(fg.compose(vt, vt))


class TestErrorsAndRoundtrips:
    def test_parse_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.graph"
        bad.write_text("{not json")
        code, _, err = run(capsys, "analyze", str(bad))
        assert code == 2
        assert json.loads(err)["error"]["code"] == "parse-error"

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "analyze", "/nonexistent.graph")
        assert code == 2

    def test_outputs_reparse(self, files, capsys):
        code, out, _ = run(capsys, "compose", files["baker"], files["baker"],
                           "--graph", files["e2"])
        assert code == 0
        t = fg.table_from_json(make_e2(), json.loads(out))
        assert len(t.pieces) == 4

    def test_determinism(self, files, capsys):
        a = run(capsys, "analyze", files["one_orbit"])[1]
        b = run(capsys, "analyze", files["one_orbit"])[1]
        assert a == b
