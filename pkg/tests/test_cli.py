import csv
import io
import json

import pytest
from click.testing import CliRunner

from jacobi_osc.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, [str(a) for a in args], env=env, catch_exceptions=False)

    return invoke


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestClassify:
    def test_nonoscillatory(self, run):
        res = run("classify", "--family", "kneser", "--c", 0.2, "--nmax", 100000)
        assert res.exit_code == 0
        rep = json.loads(res.stdout)
        assert rep["verdict"] == "Nonoscillatory" and rep["N"] == 100000

    def test_threshold_exits_2(self, run):
        res = run("classify", "--family", "kneser", "--c", 0.25, "--nmax", 100000)
        assert res.exit_code == 2 and json.loads(res.stdout)["verdict"] == "Inconclusive"

    def test_loglog_oscillatory(self, run):
        res = run("classify", "--family", "loglog", "--k", 1, "--c", -0.3, "--nmax", 100000)
        assert res.exit_code == 0 and json.loads(res.stdout)["verdict"] == "Oscillatory"

    def test_csv(self, run):
        res = run("classify", "--family", "kneser", "--c", 0.5, "--nmax", 1000, "--format", "csv")
        table = rows(res.stdout)
        assert table[0] == ["verdict", "tail_inf", "tail_sup", "threshold", "margin", "N"]
        assert table[1][0] == "Oscillatory" and table[1][1] == "-0.5"

    @pytest.mark.parametrize(
        "args, field",
        [
            (["--family", "kneser", "--c", 0.1, "--nmax", 50], "--nmax"),
            (["--family", "kneser", "--c", 0.1, "--window", 1.5], "--window"),
            (["--family", "kneser", "--c", 0.1, "--margin", -1], "--margin"),
            (["--family", "kneser"], "--c"),
            (["--family", "loglog", "--c", 0.1], "--k"),
            ([], "--family"),
        ],
    )
    def test_bad_config_exits_1(self, run, args, field):
        res = run("classify", *args)
        assert res.exit_code == 1 and field in res.stderr

    def test_usage_error_exits_1(self, run):
        assert run("classify", "--family", "bogus").exit_code == 1
        assert run("nope").exit_code == 1

    def test_out_file(self, run, tmp_path):
        out = tmp_path / "r.json"
        res = run("classify", "--family", "kneser", "--c", 0.2, "--nmax", 1000, "--out", out)
        assert res.exit_code == 0 and res.stdout == ""
        assert json.loads(out.read_text())["verdict"] == "Nonoscillatory"

    def test_model_file(self, run, tmp_path):
        f = tmp_path / "m.json"
        f.write_text(json.dumps({"family": "variable_a", "params": {"a": -2, "db": {"coef": -1, "power": 2}}}))
        res = run("classify", "--model-file", f, "--nmax", 10000)
        assert res.exit_code == 0 and json.loads(res.stdout)["verdict"] == "Oscillatory"


class TestTrace:
    def test_free(self, run):
        res = run("trace", "--family", "kneser", "--c", 0, "--nmax", 10)
        table = rows(res.stdout)
        assert res.exit_code == 0 and len(table) == 11
        assert "nodes: 0" in res.stderr

    def test_oscillatory(self, run):
        res = run("trace", "--family", "kneser", "--c", 2.25, "--nmax", 100, "--format", "json")
        nodes = json.loads(res.stdout)["nodes"]
        assert len(nodes) >= 2 and 8 <= nodes[1] <= 12

    def test_zero_a_in_table(self, run, tmp_path):
        f = tmp_path / "t.json"
        f.write_text(json.dumps({"family": "table", "a": [-1, -1, 0, -1], "b": [2, 2, 2, 2]}))
        res = run("trace", "--model-file", f, "--nmax", 3)
        assert res.exit_code == 1 and "a(2)" in res.stderr

    def test_missing_file(self, run, tmp_path):
        res = run("trace", "--model-file", tmp_path / "none.json")
        assert res.exit_code == 1 and "--model-file" in res.stderr


class TestSpectrum:
    def test_saturating(self, run):
        res = run("spectrum", "--family", "kneser", "--c", 0.2, "--lambda", 0)
        rep = json.loads(res.stdout)
        assert res.exit_code == 0 and rep["verdict_hint"] == "saturating"
        assert [n for n, _ in rep["profile"]] == [1000, 10000, 100000, 1000000]

    def test_growing(self, run):
        rep = json.loads(run("spectrum", "--family", "kneser", "--c", 2.25).stdout)
        counts = [c for _, c in rep["profile"]]
        assert rep["verdict_hint"] == "growing" and all(d in (1, 2) for d in (b - a for a, b in zip(counts, counts[1:])))

    def test_bulk_counts_grow_linearly(self, run):
        # lambda inside the essential spectrum: counts scale with N
        rep = json.loads(run("spectrum", "--family", "kneser", "--c", 0, "--lambda", 0.5, "--sizes", "1000,10000").stdout)
        c1, c2 = (c for _, c in rep["profile"])
        assert c2 == pytest.approx(10 * c1, rel=0.01)

    @pytest.mark.parametrize("sizes", ["10,5", "a,b", "", "0,10"])
    def test_bad_sizes(self, run, sizes):
        res = run("spectrum", "--family", "kneser", "--c", 0, "--sizes", sizes)
        assert res.exit_code == 1 and "--sizes" in res.stderr


class TestVerify:
    def test_reference_growth_suite(self, run):
        res = run("verify", "--suite", "lemma31", "--family", "kneser", "--c", 0)
        assert res.exit_code == 0 and all(r["passed"] for r in json.loads(res.stdout))

    def test_iterated_log_suite(self, run):
        res = run("verify", "--suite", "cor22", "--k", 1, "--nmax", 100000)
        assert res.exit_code == 0

    def test_kernel(self, run):
        res = run("verify", "--suite", "kernel", "--epsilon", 1, "--nmax", 1000)
        (rep,) = json.loads(res.stdout)
        assert res.exit_code == 0 and rep["passed"] and rep["bound"] is not None

    def test_failure_exits_1(self, run):
        # at n ~ 500 the ratio u0(n+1)/u0(n) - 1 is still ~1e-4, above the 1e-5 tolerance
        res = run("verify", "--suite", "lemma31", "--family", "loglog", "--k", 1, "--c", 0, "--nmax", 1000)
        assert res.exit_code == 1


class TestSweep:
    def test_monotone_and_consistent(self, run):
        res = run("sweep", "--c-from", 0, "--c-to", 0.5, "--c-step", 0.05, "--nmax", 100000)
        table = rows(res.stdout)
        assert table[0] == ["c", "tail_inf", "tail_sup", "verdict", "node_count", "eig_count"]
        body = table[1:]
        assert [r[0] for r in body] == ["0.0", "0.05", "0.1", "0.15", "0.2", "0.25", "0.3", "0.35", "0.4", "0.45", "0.5"]
        rank = {"Nonoscillatory": 0, "Inconclusive": 1, "Oscillatory": 2}
        ranks = [rank[r[3]] for r in body]
        assert ranks == sorted(ranks) and ranks[0] == 0 and ranks[-1] == 2
        assert all(r[4] == r[5] for r in body)

    def test_single_point(self, run):
        res = run("sweep", "--c-from", 0.3, "--c-to", 0.3, "--c-step", 0.1, "--nmax", 1000)
        assert len(rows(res.stdout)) == 2

    def test_empty_grid(self, run):
        res = run("sweep", "--c-from", 1, "--c-to", 0, "--c-step", 0.1)
        assert res.exit_code == 1

    def test_jobs_do_not_change_output(self, run):
        args = ("sweep", "--c-from", 0, "--c-to", 0.5, "--c-step", 0.1, "--nmax", 5000)
        assert run(*args).stdout == run(*args, "--jobs", 3).stdout

    def test_loglog_needs_k(self, run):
        assert run("sweep", "--family", "loglog", "--c-from", 0, "--c-to", 1, "--c-step", 1).exit_code == 1


class TestDeterminismAndEnv:
    @pytest.mark.parametrize(
        "args",
        [
            ("classify", "--family", "loglog", "--k", 2, "--c", 0.7, "--nmax", 20000),
            ("trace", "--family", "kneser", "--c", 0.3, "--nmax", 500),
            ("verify", "--suite", "expansion", "--nmax", 20000),
        ],
    )
    def test_byte_identical(self, run, args):
        assert run(*args).stdout == run(*args).stdout

    def test_log_level(self, run):
        res = run("spectrum", "--family", "kneser", "--c", 0, "--lambda", 2, "--sizes", "3",
                  env={"JACOBI_OSC_LOG": "info"})
        assert "zero pivot" in res.stderr

    def test_bad_log_level(self, run):
        res = run("spectrum", "--family", "kneser", "--c", 0, env={"JACOBI_OSC_LOG": "loud"})
        assert res.exit_code == 1 and "JACOBI_OSC_LOG" in res.stderr
