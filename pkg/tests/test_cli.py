import json
import math

import numpy as np
import pytest

from dyadkde import (
    from_edge_list,
    get_kernel,
    invert_test,
    kernel_sums,
    leave_out_estimates,
    mjk_wald_interval,
    normal_two_sided_quantile,
    pseudo_values,
    rot_bandwidth,
)
from dyadkde.cli import main, parse_grid, to_json


def write_csv(path, rows, header="i,j,value"):
    lines = [header] + [f"{i},{j},{v}" for i, j, v in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def three_at_x(tmp_path):
    p = tmp_path / "edges.csv"
    write_csv(p, [(1, 2, 2.0), (1, 3, 2.0), (2, 3, 2.0)])
    return p


@pytest.fixture
def random_complete_csv(tmp_path):
    rng = np.random.default_rng(60)
    iu, ju = np.triu_indices(12, k=1)
    rows = [(int(i + 1), int(j + 1), float(v))
            for i, j, v in zip(iu, ju, rng.normal(size=iu.size))]
    p = tmp_path / "net.csv"
    write_csv(p, rows)
    return p, rows


class TestJsonWriter:
    def test_17_significant_digits(self):
        text = to_json({"a": 1 / 3})
        assert "0.33333333333333331" in text

    def test_round_trip_lossless(self):
        values = [1 / 3, 0.75, 1e-300, 123456.789, 0.1 + 0.2]
        parsed = json.loads(to_json({"v": values}))
        assert parsed["v"] == values

    def test_non_finite_becomes_null(self):
        assert json.loads(to_json({"x": float("nan")}))["x"] is None

    def test_nested_structures(self):
        payload = {"a": [1, 2, {"b": True, "c": None}], "d": "text"}
        assert json.loads(to_json(payload)) == payload


class TestParseGrid:
    def test_range_spec(self):
        grid = parse_grid("0:10:1")
        assert len(grid) == 11
        assert grid[0] == 0.0 and grid[-1] == 10.0

    def test_list_spec(self):
        np.testing.assert_allclose(parse_grid("3,1,2"), [1.0, 2.0, 3.0])

    def test_bad_specs(self):
        for spec in ("1:2", "5:1:1", "1:2:0", ""):
            with pytest.raises(ValueError):
                parse_grid(spec)


class TestEstimate:
    def test_prints_075_and_matches_library(self, three_at_x, capsys):
        code = main(["estimate", str(three_at_x), "--x", "2.0", "--h", "1.0"])
        out = capsys.readouterr().out
        assert code == 0
        assert "theta_hat: 0.75" in out
        assert "bandwidth rule: fixed" in out

    def test_rot_rule_line_when_h_omitted(self, random_complete_csv, capsys):
        path, _ = random_complete_csv
        code = main(["estimate", str(path), "--x", "0.3"])
        out = capsys.readouterr().out
        assert code == 0
        assert "bandwidth rule: rot-complete" in out

    def test_incomplete_rule_when_pairs_missing(self, tmp_path, capsys):
        p = tmp_path / "partial.csv"
        write_csv(p, [(1, 2, 0.5), (2, 3, 1.5), (3, 4, -0.2)])  # n=4, 3 of 6
        code = main(["estimate", str(p), "--x", "0.5"])
        out = capsys.readouterr().out
        assert code == 0
        assert "bandwidth rule: rot-incomplete" in out
        assert "p_hat: 0.5" in out

    def test_duplicate_pair_exits_2(self, tmp_path, capsys):
        p = tmp_path / "dup.csv"
        write_csv(p, [(1, 2, 0.5), (2, 1, 0.7)])
        code = main(["estimate", str(p), "--x", "0.0", "--h", "1.0"])
        assert code == 2
        assert "DuplicateEdge" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = main(["estimate", str(tmp_path / "nope.csv"), "--x", "0.0"])
        assert code == 2

    def test_bad_header_exits_2(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
        assert main(["estimate", str(p), "--x", "0.0"]) == 2

    def test_constant_file_exits_3(self, tmp_path, capsys):
        p = tmp_path / "const.csv"
        write_csv(p, [(1, 2, 5.0), (1, 3, 5.0), (2, 3, 5.0)])
        code = main(["estimate", str(p), "--x", "5.0"])
        assert code == 3
        assert "ZeroSpreadSample" in capsys.readouterr().err

    def test_zero_bandwidth_exits_3(self, three_at_x, capsys):
        code = main(["estimate", str(three_at_x), "--x", "2.0", "--h", "0"])
        assert code == 3
        assert "NonPositiveBandwidth" in capsys.readouterr().err

    def test_string_labels_mapped_in_sorted_order(self, tmp_path, capsys):
        p = tmp_path / "labels.csv"
        p.write_text(
            "i,j,value\nORD,ATL,1.0\nDFW,ATL,2.0\nORD,DFW,3.0\n", encoding="utf-8"
        )
        code = main(["estimate", str(p), "--x", "1.0", "--h", "1.0",
                     "--format", "json"])
        out = capsys.readouterr().out
        assert code == 0
        payload = json.loads(out)
        assert payload["label_map"] == {"ATL": 1, "DFW": 2, "ORD": 3}

    def test_aggregate_path(self, tmp_path, capsys):
        p = tmp_path / "multi.csv"
        write_csv(p, [(1, 2, 10.0), (2, 1, 20.0), (1, 3, 1.0), (2, 3, 2.0)])
        code = main(["estimate", str(p), "--x", "15.0", "--h", "2.0",
                     "--aggregate", "mean", "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["theta_hat"] == pytest.approx(0.75 / 2.0 / 3.0)

    def test_json_output_matches_library(self, random_complete_csv, capsys):
        path, rows = random_complete_csv
        code = main(["estimate", str(path), "--x", "0.4", "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        sample = from_edge_list(rows, 12)
        h = rot_bandwidth(sample)
        from dyadkde import density_estimate

        theta = density_estimate(kernel_sums(sample, get_kernel(), 0.4, h), 12)
        assert payload["theta_hat"] == pytest.approx(theta, rel=1e-15)
        assert payload["bandwidth"] == pytest.approx(h, rel=1e-15)


class TestCI:
    def test_mjk_half_width_matches_manual_recomputation(self, random_complete_csv, capsys):
        path, rows = random_complete_csv
        code = main(["ci", str(path), "--x", "0.2", "--method", "mjk",
                     "--alpha", "0.05", "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        sample = from_edge_list(rows, 12)
        h = rot_bandwidth(sample)
        lo = leave_out_estimates(kernel_sums(sample, get_kernel(), 0.2, h), 12)
        pv = pseudo_values(lo, lo.theta_hat, 12)
        half = normal_two_sided_quantile(0.05) * math.sqrt(pv.gamma_m_sq / 12)
        assert payload["upper"] - payload["theta_hat"] == pytest.approx(half, rel=1e-9)
        assert payload["theta_hat"] - payload["lower"] == pytest.approx(half, rel=1e-9)
        assert payload["critical_value"] == pytest.approx(1.959963984540054)

    def test_el_methods_contain_theta_hat(self, random_complete_csv, capsys):
        path, _ = random_complete_csv
        for method in ("jel", "mjel"):
            code = main(["ci", str(path), "--x", "0.2", "--method", method])
            out = capsys.readouterr().out
            assert code == 0
            assert "statistic at theta_hat: " in out
            values = {}
            for line in out.splitlines():
                key, _, raw = line.partition(": ")
                values[key] = raw
            lower, upper = json.loads(values["interval"])
            theta_hat = float(values["theta_hat"])
            assert lower <= theta_hat <= upper

    def test_ci_matches_invert_test(self, random_complete_csv, capsys):
        path, rows = random_complete_csv
        code = main(["ci", str(path), "--x", "0.2", "--method", "mjel",
                     "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        sample = from_edge_list(rows, 12)
        res = invert_test(sample, get_kernel(), 0.2, rot_bandwidth(sample), 0.05,
                          method="mjel")
        assert payload["lower"] == pytest.approx(res.lower, abs=1e-12)
        assert payload["upper"] == pytest.approx(res.upper, abs=1e-12)

    def test_bad_alpha_exits_2(self, three_at_x):
        assert main(["ci", str(three_at_x), "--x", "2.0", "--alpha", "1.5"]) == 2

    def test_degenerate_sample_exits_3(self, tmp_path, capsys):
        p = tmp_path / "four.csv"
        rows = [(1, 2, 1.0), (1, 3, 1.0), (1, 4, 1.0), (2, 3, 1.0), (2, 4, 1.0),
                (3, 4, 1.0)]
        write_csv(p, rows)
        code = main(["ci", str(p), "--x", "1.0", "--h", "1.0", "--method", "mjk"])
        assert code == 3
        assert "NonPositiveModifiedVariance" in capsys.readouterr().err


class TestProfile:
    def test_grid_row_counts(self, random_complete_csv, capsys):
        path, _ = random_complete_csv
        code = main(["profile", str(path), "--grid=-1:1:0.25",
                     "--methods", "mjel,mjk", "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert len(payload["rows"]) == 9 * 2
        xs = sorted({row["x"] for row in payload["rows"]})
        assert len(xs) == 9

    def test_rows_sorted_and_clamped(self, random_complete_csv, capsys):
        path, _ = random_complete_csv
        code = main(["profile", str(path), "--grid=-3:3:0.5",
                     "--methods", "mjel", "--format", "json"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        xs = [row["x"] for row in payload["rows"]]
        assert xs == sorted(xs)
        for row in payload["rows"]:
            if row["status"] == "ok":
                assert row["theta_hat"] >= 0.0
                assert row["lower"] >= 0.0
                assert row["lower"] <= row["theta_hat"] <= row["upper"]
            else:
                assert row["status"] != ""

    def test_row_order_independent_of_file_order(self, tmp_path, capsys):
        rng = np.random.default_rng(61)
        iu, ju = np.triu_indices(8, k=1)
        rows = [(int(i + 1), int(j + 1), float(v))
                for i, j, v in zip(iu, ju, rng.normal(size=iu.size))]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(a, rows)
        shuffled = list(rows)
        rng.shuffle(shuffled)
        write_csv(b, shuffled)
        args = ["--grid=-1:1:0.5", "--methods", "jel", "--format", "json"]
        assert main(["profile", str(a)] + args) == 0
        out_a = capsys.readouterr().out
        assert main(["profile", str(b)] + args) == 0
        out_b = capsys.readouterr().out
        assert out_a == out_b

    def test_csv_output_has_status_column(self, random_complete_csv, capsys):
        path, _ = random_complete_csv
        code = main(["profile", str(path), "--grid", "0,0.5", "--methods", "mjk"])
        out = capsys.readouterr().out.splitlines()
        assert code == 0
        assert out[0] == "x,method,theta_hat,lower,upper,h,status"
        assert all(line.endswith(",ok") for line in out[1:])


class TestSimulate:
    def test_coverage_json_deterministic(self, tmp_path, capsys):
        out1, out2 = tmp_path / "c1.json", tmp_path / "c2.json"
        base = ["simulate", "--beta", "1", "--n", "20", "--reps", "40",
                "--seed", "5", "--methods", "jel,mjel,mjk"]
        assert main(base + ["--out", str(out1)]) == 0
        assert main(base + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        table = capsys.readouterr().out
        assert "n=20" in table

    def test_flags_override_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "sim.cfg"
        cfg.write_text("beta=1\nn=20\nreps=30\nseed=9\n# comment\np=1\n",
                       encoding="utf-8")
        out = tmp_path / "c.json"
        code = main(["simulate", "--config", str(cfg), "--reps", "25",
                     "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["config"]["reps"] == 25
        assert payload["config"]["beta"] == 1

    def test_results_match_library(self, tmp_path):
        from dyadkde import SimulationConfig, coverage_experiment, report_json_dict

        out = tmp_path / "c.json"
        assert main(["simulate", "--beta", "0", "--n", "25", "--reps", "60",
                     "--seed", "3", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        report = coverage_experiment(SimulationConfig(beta=0, n=25, reps=60,
                                                      base_seed=3))
        assert payload == json.loads(to_json(report_json_dict(report)))

    def test_incomplete_defaults_to_rot_incomplete(self, tmp_path):
        out = tmp_path / "c.json"
        assert main(["simulate", "--beta", "1", "--n", "20", "--reps", "20",
                     "--p", "0.5", "--seed", "2", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["config"]["bandwidth_rule"] == "rot-incomplete"

    def test_invalid_config_exits_2(self, tmp_path, capsys):
        assert main(["simulate", "--beta", "3", "--n", "20",
                     "--out", str(tmp_path / "x.json")]) == 2
        assert main(["simulate", "--n", "20",
                     "--out", str(tmp_path / "y.json")]) == 2


class TestBandwidth:
    def test_complete_rule(self, random_complete_csv, capsys):
        path, rows = random_complete_csv
        assert main(["bandwidth", str(path)]) == 0
        out = capsys.readouterr().out
        assert "rule: rot-complete" in out
        h = float(out.splitlines()[0].split(": ")[1])
        assert h == pytest.approx(rot_bandwidth(from_edge_list(rows, 12)), rel=1e-15)

    def test_incomplete_rule_prints_p_hat(self, tmp_path, capsys):
        p = tmp_path / "partial.csv"
        write_csv(p, [(1, 2, 0.5), (2, 3, 1.5), (3, 4, -0.2)])
        assert main(["bandwidth", str(p)]) == 0
        out = capsys.readouterr().out
        assert "rule: rot-incomplete" in out
        assert "p_hat: 0.5" in out

    def test_constant_file_exits_3(self, tmp_path, capsys):
        p = tmp_path / "const.csv"
        write_csv(p, [(1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)])
        assert main(["bandwidth", str(p)]) == 3
        assert "ZeroSpreadSample" in capsys.readouterr().err


def test_usage_error_exits_2():
    assert main(["estimate"]) == 2
    assert main(["frobnicate"]) == 2
