import json
import subprocess
import sys

import pytest

from agreetree.cli import main


def run_cli(*argv):
    """Run the CLI in-process; returns (exit_code, stdout)."""
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def run_proc(*argv):
    """Run the CLI in a fresh interpreter; returns the CompletedProcess."""
    return subprocess.run(
        [sys.executable, "-m", "agreetree.cli", *argv],
        capture_output=True,
        timeout=300,
    )


@pytest.fixture
def trees(tmp_path):
    def write(name, argv):
        code, out = run_cli("gen", *argv)
        assert code == 0
        path = tmp_path / name
        path.write_text(out)
        return str(path)

    return write


class TestGen:
    def test_balanced(self):
        assert run_cli("gen", "balanced", "--m", "2") == (0, "((1,2),(3,4));\n")

    def test_swap_pair(self):
        code, out = run_cli("gen", "swap-pair", "--k", "1")
        assert code == 0
        assert out.splitlines()[1] == "((1,3),(2,4));"

    def test_fhk_leaf_count(self):
        code, out = run_cli("gen", "fhk", "--h", "4", "--k", "2")
        assert code == 0
        assert out.count(",") == 10  # 11 leaves

    def test_enumerate(self):
        code, out = run_cli("gen", "enumerate", "--n", "4")
        assert code == 0 and len(out.splitlines()) == 3

    def test_missing_param(self):
        with pytest.raises(SystemExit):
            run_cli("gen", "balanced")

    def test_enumerate_guard_env(self, monkeypatch, capsys):
        assert main(["gen", "enumerate", "--n", "8"]) == 1
        capsys.readouterr()
        monkeypatch.setenv("AGREETREE_GUARDS", "off")
        assert main(["gen", "enumerate", "--n", "8"]) == 0
        out = capsys.readouterr().out
        assert len(out.splitlines()) == 10395


class TestCompute:
    def test_mast_identical(self, trees):
        path = trees("a.nwk", ["balanced", "--m", "2"])
        code, out = run_cli("mast", path, path)
        assert code == 0
        assert "result_size: 4" in out

    def test_match1_rooted(self, trees):
        t1 = trees("t1.nwk", ["balanced", "--m", "3"])
        t2 = trees("t2.nwk", ["random", "--n", "8", "--rooted", "--seed", "3"])
        code, out = run_cli("match1", t1, t2)
        assert code == 0
        assert "bound_met: True" in out

    def test_match1_json(self, trees):
        t1 = trees("t1.nwk", ["balanced", "--m", "3"])
        t2 = trees("t2.nwk", ["random", "--n", "8", "--rooted", "--seed", "3"])
        code, out = run_cli("match1", t1, t2, "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["bound_met"] is True
        assert payload["achieved"] == payload["result_size"]

    def test_match1_trace(self, trees):
        t1 = trees("t1.nwk", ["balanced", "--m", "3"])
        t2 = trees("t2.nwk", ["random", "--n", "8", "--rooted", "--seed", "3"])
        code, out = run_cli("match1", t1, t2, "--trace")
        rules = [json.loads(line)["rule"] for line in out.splitlines() if line.startswith("{")]
        assert code == 0 and rules[-1] == "base"

    def test_match2_swap_pair(self, trees, tmp_path):
        code, out = run_cli("gen", "swap-pair", "--k", "2")
        lines = out.splitlines()
        p1 = tmp_path / "s1.nwk"
        p2 = tmp_path / "s2.nwk"
        p1.write_text(lines[0] + "\n")
        p2.write_text(lines[1] + "\n")
        code, out = run_cli("match2", str(p1), str(p2))
        assert code == 0
        assert "bound_met: True" in out

    def test_match2_unrooted(self, trees, tmp_path):
        code, out = run_cli("gen", "swap-pair", "--k", "1", "--unrooted")
        lines = out.splitlines()
        p1 = tmp_path / "u1.nwk"
        p2 = tmp_path / "u2.nwk"
        p1.write_text(lines[0] + "\n")
        p2.write_text(lines[1] + "\n")
        code, out = run_cli("match2", str(p1), str(p2))
        assert code == 0

    def test_agree(self, trees):
        t1 = trees("a.nwk", ["random", "--n", "32", "--seed", "1"])
        t2 = trees("b.nwk", ["random", "--n", "32", "--seed", "2"])
        code, out = run_cli("agree", t1, t2)
        assert code == 0 and "bound_met: True" in out

    def test_match_ab(self, trees):
        t1 = trees("a.nwk", ["random", "--n", "32", "--model", "yule", "--seed", "4"])
        t2 = trees("b.nwk", ["random", "--n", "32", "--model", "yule", "--seed", "5"])
        code, out = run_cli("match-ab", t1, t2, "--k", "3")
        assert code == 0 and "bound_met: True" in out

    def test_match_multi(self, trees):
        paths = [trees(f"m{i}.nwk", ["balanced", "--m", "3"]) for i in range(3)]
        code, out = run_cli("match-multi", *paths)
        assert code == 0
        assert "result_size: 8" in out

    def test_decompose(self, trees):
        path = trees("c.nwk", ["caterpillar", "--n", "16"])
        code, out = run_cli("decompose", path)
        assert code == 0
        payload = json.loads(out)
        assert payload["meets_threshold"] is True

    def test_parse_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.nwk"
        bad.write_text("(1,2;")
        code = main(["mast", str(bad), str(bad)])
        assert code == 1

    def test_precondition_error_exit_code(self, trees):
        t1 = trees("c.nwk", ["caterpillar", "--n", "8", "--rooted"])
        t2 = trees("d.nwk", ["random", "--n", "8", "--rooted", "--seed", "1"])
        assert main(["match1", t1, t2]) == 1


class TestBounds:
    def test_constants(self):
        code, out = run_cli("bounds", "--n", "65536")
        assert code == 0
        assert "alpha*:  0.205597" in out
        assert "delta1*: 0.170536" in out
        assert "path length threshold: 16" in out


class TestBench:
    def test_csv_schema_and_summary(self, tmp_path):
        out_path = tmp_path / "trials.csv"
        code, out = run_cli(
            "bench", "--n", "16", "--trials", "4", "--algorithms", "match1,match2",
            "--seed", "7", "--out", str(out_path),
        )
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == (
            "n,model,seed,algorithm,delta,result_size,bound_value,exact_size,"
            "runtime_ms,certificate_ok"
        )
        assert len(lines) == 1 + 2 * 4
        assert all(line.endswith(",0,True") for line in lines[1:])
        assert "summary algorithm=match1 n=16 trials=4" in out

    def test_mast_floor_rows(self, tmp_path):
        out_path = tmp_path / "floor.csv"
        code, out = run_cli(
            "bench", "--n", "3,4", "--algorithms", "mast-floor", "--out", str(out_path)
        )
        assert code == 0
        rows = out_path.read_text().splitlines()[1:]
        sizes = [int(r.split(",")[5]) for r in rows]
        assert sizes == [3, 3]

    def test_unwritable_path(self, tmp_path):
        code, _ = run_cli(
            "bench", "--n", "16", "--trials", "1", "--algorithms", "match1",
            "--out", str(tmp_path / "nodir" / "x.csv"),
        )
        assert code == 1


class TestDeterminism:
    def test_gen_byte_identical(self):
        a = run_proc("gen", "random", "--n", "40", "--seed", "11")
        b = run_proc("gen", "random", "--n", "40", "--seed", "11")
        assert a.stdout == b.stdout and a.returncode == 0

    def test_bench_byte_identical(self, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            path = tmp_path / name
            proc = run_proc(
                "bench", "--n", "16,32", "--trials", "3",
                "--algorithms", "match1,match2,agree", "--seed", "5",
                "--out", str(path),
            )
            assert proc.returncode == 0
            outs.append((proc.stdout, path.read_bytes()))
        assert outs[0] == outs[1]

    def test_match_byte_identical(self, tmp_path):
        t1 = tmp_path / "t1.nwk"
        t2 = tmp_path / "t2.nwk"
        t1.write_bytes(run_proc("gen", "balanced", "--m", "4").stdout)
        t2.write_bytes(run_proc("gen", "random", "--n", "16", "--rooted", "--seed", "9").stdout)
        a = run_proc("match1", str(t1), str(t2), "--trace")
        b = run_proc("match1", str(t1), str(t2), "--trace")
        assert a.stdout == b.stdout and a.returncode == 0
