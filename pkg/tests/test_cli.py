"""Exit codes, file outputs, and determinism of the command-line surface."""

import json

import pytest

from stericzip import parse_pdb, synthetic_template, write_pdb
from stericzip.cli import main
from stericzip.template import template_path


@pytest.fixture()
def template_file(tmp_path):
    path = tmp_path / "template.pdb"
    path.write_text(template_path().read_text())
    return path


def run(*args):
    return main([str(a) for a in args])


class TestBuild:
    def test_build_succeeds_with_two_files(self, tmp_path, template_file):
        out = tmp_path / "m2.pdb"
        code = run("build", "--template", template_file, "--sequence", "GAAAAG",
                   "--out", out, "--seed", "42")
        assert code == 0
        assert out.exists()
        report = json.loads((tmp_path / "m2.pdb.report.json").read_text())
        assert report["success"] is True
        assert report["seed"] == 42
        assert report["chain_ids"] == list("ABCDEFGHIJKL")
        model = parse_pdb(out.read_text())
        assert model.chain_ids() == list("ABCDEFGHIJKL")

    def test_bad_alphabet_exits_2_without_files(self, tmp_path, template_file):
        out = tmp_path / "bad.pdb"
        code = run("build", "--template", template_file, "--sequence", "GAAAXG",
                   "--out", out, "--seed", "1")
        assert code == 2
        assert not out.exists()
        assert not (tmp_path / "bad.pdb.report.json").exists()

    def test_byte_identical_reruns(self, tmp_path, template_file):
        out_a = tmp_path / "a.pdb"
        out_b = tmp_path / "b.pdb"
        for out in (out_a, out_b):
            assert run("build", "--template", template_file, "--sequence", "AAAAGA",
                       "--out", out, "--seed", "7") == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        ra = json.loads((tmp_path / "a.pdb.report.json").read_text())
        rb = json.loads((tmp_path / "b.pdb.report.json").read_text())
        assert ra == rb

    def test_missing_template_is_domain_failure(self, tmp_path):
        code = run("build", "--template", tmp_path / "nope.pdb", "--sequence", "GAAAAG",
                   "--out", tmp_path / "x.pdb", "--seed", "1")
        assert code == 1

    def test_generated_seed_echoed(self, tmp_path, template_file):
        out = tmp_path / "m.pdb"
        assert run("build", "--template", template_file, "--sequence", "GAAAAG",
                   "--out", out) == 0
        report = json.loads((tmp_path / "m.pdb.report.json").read_text())
        assert isinstance(report["seed"], int)


class TestMutate:
    def test_mutate_writes_renumbered_chain(self, tmp_path, template_file):
        out = tmp_path / "mut.pdb"
        assert run("mutate", "--in", template_file, "--chain", "A",
                   "--sequence", "GAAAAG", "--out", out) == 0
        s = parse_pdb(out.read_text())
        assert [r.res_name for r in s.chain("A").residues] == [
            "GLY", "ALA", "ALA", "ALA", "ALA", "GLY"
        ]

    def test_bad_sequence_exits_2(self, tmp_path, template_file):
        assert run("mutate", "--in", template_file, "--chain", "A",
                   "--sequence", "QQQQQQ", "--out", tmp_path / "x.pdb") == 2


class TestTransform:
    def test_adds_screw_image(self, tmp_path, template_file):
        out = tmp_path / "g.pdb"
        code = run("transform", "--in", template_file, "--chain", "A", "--new-chain", "G",
                   "--matrix", "1", "0", "0", "0", "-1", "0", "0", "0", "-1",
                   "--translate", "9.075", "4.7765", "0", "--out", out)
        assert code == 0
        s = parse_pdb(out.read_text())
        assert s.chain_ids() == ["A", "B", "G"]

    def test_missing_chain_exits_1(self, tmp_path, template_file):
        code = run("transform", "--in", template_file, "--chain", "Q", "--new-chain", "G",
                   "--matrix", "1", "0", "0", "0", "1", "0", "0", "0", "1",
                   "--translate", "0", "0", "0", "--out", tmp_path / "x.pdb")
        assert code == 1


class TestEnergy:
    def test_report_on_built_model(self, tmp_path, template_file):
        model = tmp_path / "m.pdb"
        assert run("build", "--template", template_file, "--sequence", "GAAAAG",
                   "--out", model, "--seed", "3") == 0
        report_path = tmp_path / "energy.json"
        assert run("energy", "--in", model, "--sigma", "5.82", "--report", report_path) == 0
        report = json.loads(report_path.read_text())
        assert report["hbond_count"] > 0
        assert report["clash_count"] == 0
        assert len(report["contacts"]) == 2

    def test_empty_structure(self, tmp_path):
        empty = tmp_path / "empty.pdb"
        empty.write_text("END\n")
        report_path = tmp_path / "energy.json"
        assert run("energy", "--in", empty, "--report", report_path) == 0
        report = json.loads(report_path.read_text())
        assert report["hbond_count"] == 0
        assert report["clashes"] == []
        assert report["total_contact_energy"] == 0.0

    def test_truncated_line_names_line(self, tmp_path, capsys):
        broken = tmp_path / "broken.pdb"
        text = write_pdb(synthetic_template()).splitlines()
        text[3] = text[3][:40]
        broken.write_text("\n".join(text) + "\n")
        assert run("energy", "--in", broken, "--report", tmp_path / "x.json") == 1
        assert "line 4" in capsys.readouterr().err


class TestBench:
    def test_unknown_suite_exits_2(self, tmp_path):
        assert run("bench", "--suite", "fancy", "--report", tmp_path / "b.json") == 2

    def test_zero_runs_exits_2(self, tmp_path):
        assert run("bench", "--suite", "classic", "--runs", "0",
                   "--report", tmp_path / "b.json") == 2

    def test_deterministic_report_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            run("bench", "--suite", "classic", "--dims", "2", "--runs", "2",
                "--seed", "5", "--budget", "15000", "--report", path)
        assert a.read_bytes() == b.read_bytes()
