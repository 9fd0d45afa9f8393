import csv
import io
import json
import subprocess
import sys

import pytest

from xorcount import __version__
from xorcount.cli import crossover, fig2_rows, main
from xorcount.formula import count_models, read_dimacs

HAMMING_G = "4 7\n1000110\n0100101\n0010011\n0001111\n"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def taut16(tmp_path):
    p = tmp_path / "taut16.cnf"
    p.write_text("p cnf 16 0\n")
    return str(p)


class TestCount:
    def test_record(self, capsys, taut16):
        code, out, _ = run(capsys, "count", taut16, "--alpha", "1.5", "--beta", "1.5", "--delta", "0.1", "--seed", "7")
        assert code == 0
        rec = json.loads(out)
        assert rec["u"] - rec["l"] <= 5
        assert rec["seed"] == 7 and rec["version"] == __version__
        for key in ("count_low", "count_high", "iterations", "sat_calls", "trials_per_decision", "lambda_per_iteration", "params"):
            assert key in rec
        assert len(rec["lambda_per_iteration"]) == rec["iterations"]

    def test_reproducible_bytes(self, capsys, taut16):
        outs = []
        for _ in range(2):
            _, out, _ = run(capsys, "count", taut16, "--seed", "11")
            rec = json.loads(out)
            rec.pop("wall_time_ms")
            outs.append(json.dumps(rec, sort_keys=True))
        assert outs[0] == outs[1]

    def test_dmin_changes_density(self, capsys, tmp_path):
        p = tmp_path / "f.cnf"
        p.write_text("p cnf 12 0\nx 1 2 3 0\n")
        _, a, _ = run(capsys, "count", str(p), "--seed", "1")
        _, b, _ = run(capsys, "count", str(p), "--seed", "1", "--d-min", "5")
        la, lb = json.loads(a)["lambda_per_iteration"], json.loads(b)["lambda_per_iteration"]
        assert la[0] != lb[0] and json.loads(b)["params"]["d_min"] == 5

    def test_parse_error_exit(self, capsys, tmp_path):
        p = tmp_path / "bad.cnf"
        p.write_text("p cnf 2 1\n1 3 0\n")
        code, _, err = run(capsys, "count", str(p))
        assert code == 3 and "out of range" in err

    def test_missing_file_exit(self, capsys, tmp_path):
        assert run(capsys, "count", str(tmp_path / "none.cnf"))[0] == 3

    def test_unknown_exit(self, capsys, taut16):
        code, _, _ = run(capsys, "count", taut16, "--seed", "1", "--backend", "external", "--solver-cmd", "/nonexistent/solver")
        assert code == 2

    def test_usage_exits(self, capsys, taut16):
        assert run(capsys, "count", taut16, "--alpha", "0.5")[0] == 1
        assert run(capsys, "count", taut16, "--backend", "external")[0] == 1
        with pytest.raises(SystemExit) as exc:
            main(["count"])
        assert exc.value.code == 1
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_external_backend(self, capsys, tmp_path):
        p = tmp_path / "f.cnf"
        p.write_text("p cnf 3 1\n1 2 0\n")
        cmd = f"{sys.executable} -m xorcount.solver"
        code, out, _ = run(capsys, "count", str(p), "--seed", "2", "--delta", "0.45", "--backend", "external", "--solver-cmd", cmd, "--xor-mode", "cnf")
        assert code == 0 and json.loads(out)["params"]["xor_mode"] == "cnf"


class TestTables:
    def test_table1_rows(self, capsys):
        code, out, _ = run(capsys, "table1")
        data = {(int(r["m"]), int(r["s"])): r for r in rows(out)}
        assert code == 0 and len(data) == 12
        r = data[(50, 13)]
        assert [float(r[k]) for k in ("d1", "d5", "d20")] == pytest.approx([16.85, 11.76, 3.88], abs=0.02)
        r = data[(100, 11)]
        assert [float(r[k]) for k in ("d1", "d5", "d20")] == pytest.approx([39.05, 23.65, 7.40], abs=0.02)

    def test_six_significant_digits(self, capsys):
        _, out, _ = run(capsys, "lambda-star", "--m", "50", "--s", "13", "--beta", "2", "--d", "1", "--gamma", "0.8")
        header, line = out.strip().splitlines()
        assert header == "m,s,beta,d,gamma,lambda_star,lambda_star_times_m"
        lam = line.split(",")[5]
        assert len(lam.replace("0.", "", 1).lstrip("0")) <= 6

    def test_sweep_sorted_and_filtered(self, capsys):
        _, out, _ = run(capsys, "sweep", "--m", "64,32", "--s", "3,1:2", "--d", "40,1")
        keys = [(int(r["m"]), int(r["s"]), int(r["d"])) for r in rows(out)]
        assert keys == sorted(keys) and (32, 1, 40) not in keys and (64, 1, 40) in keys

    def test_sweep_empty_range_has_header(self, capsys):
        _, out, _ = run(capsys, "sweep", "--m", "10", "--s", "3:1")
        assert out.strip() == "m,s,beta,d,gamma,lambda_star,lambda_star_times_m"

    def test_bound(self, capsys):
        _, out, _ = run(capsys, "bound", "--m", "50", "--s", "10", "--beta", "2", "--d", "5", "--lambda", "0.5")
        assert float(rows(out)[0]["B"]) == pytest.approx(0.249756, abs=1e-6)

    def test_fig1(self, capsys):
        _, out, _ = run(capsys, "fig1", "--m", "32")
        data = rows(out)
        assert {int(r["d"]) for r in data} == {1, 5, 10, 20} and len(data) == 4 * 32

    def test_fig2_m32(self, capsys):
        _, out, _ = run(capsys, "fig2", "--m", "32")
        flags = [r["gain"] == "1" for r in rows(out)]
        assert all(flags[:10]) and not flags[10]
        assert crossover(fig2_rows(32)) == 10


class TestCodes:
    def test_gen_bch(self, capsys, tmp_path):
        p = tmp_path / "f21.cnf"
        assert run(capsys, "gen-bch", "--q", "5", "--t", "2", "-o", str(p))[0] == 0
        text = p.read_text()
        assert text.splitlines()[0] == "c code n=31 k=21 dmin>=5"
        f = read_dimacs(str(p))
        assert f.num_vars == 31 and len(f.xors) == 10

    def test_gen_bch_bad_params(self, capsys):
        assert run(capsys, "gen-bch", "--q", "2", "--t", "1")[0] == 1

    def test_embed(self, capsys, tmp_path):
        phi = tmp_path / "phi4.cnf"
        phi.write_text("p cnf 4 2\n1 2 0\n-3 4 0\n")
        g = tmp_path / "hamming74.G"
        g.write_text(HAMMING_G)
        out = tmp_path / "out.cnf"
        code, printed, _ = run(capsys, "embed", str(phi), "--gen", str(g), "-o", str(out), "--print-d")
        assert code == 0 and printed.strip() == "3"
        f2 = read_dimacs(str(out))
        assert f2.num_vars == 11 and count_models(f2) == count_models(read_dimacs(str(phi)))

    def test_embed_overclaimed_distance(self, capsys, tmp_path):
        phi = tmp_path / "phi4.cnf"
        phi.write_text("p cnf 4 0\n")
        g = tmp_path / "h.G"
        g.write_text(HAMMING_G)
        assert run(capsys, "embed", str(phi), "--gen", str(g), "--d", "4")[0] == 1

    def test_embed_bad_matrix(self, capsys, tmp_path):
        phi = tmp_path / "phi4.cnf"
        phi.write_text("p cnf 4 0\n")
        g = tmp_path / "h.G"
        g.write_text("4 7\n10\n")
        assert run(capsys, "embed", str(phi), "--gen", str(g))[0] == 3

    def test_mindist(self, capsys, tmp_path):
        p = tmp_path / "tiny.cnf"
        p.write_text("p cnf 3 0\nx -1 2 0\nx -2 3 0\n")
        code, out, _ = run(capsys, "mindist", str(p))
        assert code == 0 and out.strip() == "3"

    def test_mindist_guard(self, capsys, tmp_path):
        p = tmp_path / "wide.cnf"
        p.write_text("p cnf 40 0\n")
        assert run(capsys, "mindist", str(p))[0] == 1


def test_version_flag():
    out = subprocess.run([sys.executable, "-m", "xorcount.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
