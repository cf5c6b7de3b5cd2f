import json

import numpy as np
import pytest

import nmpg.prox
from nmpg.cli import (
    ConfigError,
    cmd_check,
    cmd_compare,
    cmd_run,
    config_to_dict,
    load_config,
    main,
    parse_config,
    read_trace_csv,
    write_trace_csv,
)


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


BASE_CONFIG = {
    "problem": {"kind": "lasso_identity", "dim": 6, "seed": 1, "lambda": 0.5},
    "params": {"epsilon": 1e-8},
    "x0": "zeros",
    "record_iterates": False,
    "out_dir": "runs",
    "repeats": 1,
}


class TestConfigParsing:
    def test_round_trip(self):
        config = parse_config(BASE_CONFIG)
        assert parse_config(config_to_dict(config)) == config

    def test_unknown_top_level_key(self):
        doc = dict(BASE_CONFIG, tolerance=1e-8)
        with pytest.raises(ConfigError, match="tolerance"):
            parse_config(doc)

    def test_unknown_param_key_named(self):
        doc = dict(BASE_CONFIG, params={"gamma_mim": 1e-8})
        with pytest.raises(ConfigError, match="gamma_mim"):
            parse_config(doc)

    def test_invalid_bounds_name_field(self):
        doc = dict(BASE_CONFIG, params={"gamma_min": 2.0, "gamma_max": 1.0})
        with pytest.raises(ConfigError, match="gamma_min"):
            parse_config(doc)

    def test_policies_parse(self):
        doc = dict(
            BASE_CONFIG,
            params={
                "gamma_init_policy": {"policy": "constant", "value": 0.5},
                "reference_policy": {"rule": "max", "window": 7},
            },
            x0={"policy": "seeded", "seed": 3},
        )
        config = parse_config(doc)
        assert parse_config(config_to_dict(config)) == config

    def test_malformed_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\n  broken\n}", encoding="utf-8")
        with pytest.raises(ConfigError, match="line"):
            load_config(path)

    @pytest.mark.parametrize(
        "doc, field",
        [
            (dict(BASE_CONFIG, problem={"kind": "lasso_identity", "dim": "big"}),
             "problem.dim"),
            (dict(BASE_CONFIG, params={"epsilon": {"oops": 1}}), "params.epsilon"),
            (dict(BASE_CONFIG, repeats="three"), "repeats"),
            (dict(BASE_CONFIG, x0={"policy": "seeded", "seed": None}), "x0.seed"),
            (dict(BASE_CONFIG, params={"reference_policy": {"rule": "max",
                                                            "window": "wide"}}),
             "params.reference_policy.window"),
        ],
    )
    def test_wrong_value_types_name_the_field(self, doc, field):
        with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
            parse_config(doc)


class TestTraceFiles:
    def test_round_trip(self, tmp_path):
        from nmpg import ProblemSpec, SolverParams, build_problem, solve

        problem = build_problem(ProblemSpec(kind="lasso_general", dim=6, seed=0))
        result = solve(problem, SolverParams(), np.zeros(6))
        path = tmp_path / "trace.csv"
        write_trace_csv(path, result.trace)
        assert read_trace_csv(path) == result.trace


class TestCmdRun:
    def test_successful_run(self, tmp_path):
        config = dict(BASE_CONFIG, out_dir=str(tmp_path / "out"))
        code = cmd_run(write_config(tmp_path, config))
        assert code == 0
        trace = read_trace_csv(tmp_path / "out" / "trace_000.csv")
        assert trace[-1].residual <= 1e-8
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["runs"][0]["status"] == "converged_residual"
        assert summary["runs"][0]["trace_file"] == "trace_000.csv"
        assert summary["runs"][0]["audit"]["pass"]

    def test_summary_rate_fit_uses_numerical_optimum(self, tmp_path):
        # no closed-form optimum on this kind; the harness solves for one
        config = dict(
            BASE_CONFIG,
            problem={"kind": "lasso_general", "dim": 10, "seed": 0, "lambda": 0.1},
            params={"epsilon": 1e-6},
        )
        assert cmd_run(write_config(tmp_path, config), out_dir=str(tmp_path / "o")) == 0
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        rates = summary["runs"][0]["rates"]
        assert rates and rates[0]["mode"] == "q_linear" and rates[0]["pass"]

    def test_summary_rate_fit_sublinear_class(self, tmp_path):
        config = dict(
            BASE_CONFIG,
            problem={"kind": "quartic_scalar", "dim": 1},
            params={"epsilon": 0.0, "max_outer_iters": 2000},
            x0={"policy": "seeded", "seed": 0},
        )
        assert cmd_run(write_config(tmp_path, config), out_dir=str(tmp_path / "q")) == 0
        summary = json.loads((tmp_path / "q" / "summary.json").read_text())
        rates = summary["runs"][0]["rates"]
        assert rates and rates[0]["mode"] == "sublinear_power"
        assert rates[0]["predicted"] == -2.0 and rates[0]["pass"]

    def test_config_error_exit_1(self, tmp_path, capsys):
        config = dict(BASE_CONFIG, params={"gamma_min": 2.0, "gamma_max": 1.0})
        code = cmd_run(write_config(tmp_path, config))
        assert code == 1
        assert "gamma_min" in capsys.readouterr().err

    def test_forced_backtrack_failure_exit_2(self, tmp_path, capsys):
        config = dict(
            BASE_CONFIG,
            problem={"kind": "lasso_general", "dim": 10, "seed": 0, "lambda": 0.1},
            params={"max_backtracks": 0},
            out_dir=str(tmp_path / "out"),
        )
        code = cmd_run(write_config(tmp_path, config))
        assert code == 2
        assert "backtrack_cap_exceeded" in capsys.readouterr().err

    def test_bitwise_identical_reruns(self, tmp_path):
        config = dict(
            BASE_CONFIG,
            problem={"kind": "exp_fit_l1", "dim": 6, "seed": 0, "lambda": 0.05},
            x0={"policy": "seeded", "seed": 5},
        )
        path = write_config(tmp_path, config)
        assert cmd_run(path, out_dir=str(tmp_path / "a")) == 0
        assert cmd_run(path, out_dir=str(tmp_path / "b")) == 0
        a = (tmp_path / "a" / "trace_000.csv").read_bytes()
        b = (tmp_path / "b" / "trace_000.csv").read_bytes()
        assert a == b

    def test_repeats_vary_only_seeded_start(self, tmp_path):
        config = dict(
            BASE_CONFIG,
            problem={"kind": "lasso_general", "dim": 6, "seed": 0, "lambda": 0.1},
            x0={"policy": "seeded", "seed": 100},
            repeats=3,
        )
        assert cmd_run(write_config(tmp_path, config), out_dir=str(tmp_path / "o")) == 0
        traces = [
            read_trace_csv(tmp_path / "o" / f"trace_{i:03d}.csv") for i in range(3)
        ]
        assert traces[0] != traces[1]  # different x0 seeds
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert [r["trace_file"] for r in summary["runs"]] == [
            "trace_000.csv",
            "trace_001.csv",
            "trace_002.csv",
        ]


class TestCmdCompare:
    def test_three_rows_converge(self, tmp_path):
        config = dict(
            BASE_CONFIG,
            problem={"kind": "lasso_general", "dim": 10, "seed": 0, "lambda": 0.1},
        )
        code = cmd_compare(write_config(tmp_path, config), out_dir=str(tmp_path / "c"))
        assert code == 0
        rows = json.loads((tmp_path / "c" / "compare_summary.json").read_text())["rows"]
        assert [r["policy"] for r in rows] == ["monotone", "mean_rule", "max_rule"]
        assert all(r["status"] == "converged_residual" for r in rows)

    def test_p_min_one_collapses_to_monotone(self, tmp_path):
        config = dict(
            BASE_CONFIG,
            problem={"kind": "lasso_general", "dim": 8, "seed": 0, "lambda": 0.1},
            params={"p_min": 1.0},
        )
        assert cmd_compare(write_config(tmp_path, config), out_dir=str(tmp_path / "c")) == 0
        mono = read_trace_csv(tmp_path / "c" / "compare_monotone.csv")
        mean = read_trace_csv(tmp_path / "c" / "compare_mean_rule.csv")
        assert mono == mean

    def test_epsilon_zero_still_emits_comparison(self, tmp_path):
        config = dict(
            BASE_CONFIG,
            problem={"kind": "quartic_scalar", "dim": 1},
            params={"epsilon": 0.0, "max_outer_iters": 200},
            x0={"policy": "seeded", "seed": 0},
        )
        code = cmd_compare(write_config(tmp_path, config), out_dir=str(tmp_path / "c"))
        assert code == 0
        rows = json.loads((tmp_path / "c" / "compare_summary.json").read_text())["rows"]
        assert all(r["status"] == "max_iters" for r in rows)
        assert len(rows) == 3


class TestCmdCheck:
    def test_pristine_build_passes(self, capsys):
        assert cmd_check() == 0
        out = capsys.readouterr().out
        assert "[FAIL]" not in out
        assert "m_constant_table" in out

    def test_flipped_tiebreak_detected(self, monkeypatch):
        original = nmpg.prox.prox_l0

        def flipped(v, tau):
            import numpy as np

            v = np.asarray(v, dtype=float)
            return np.where(np.abs(v) >= np.sqrt(2.0 * tau), v, 0.0)  # >= not >

        monkeypatch.setattr(nmpg.prox, "prox_l0", flipped)
        try:
            assert cmd_check("prox_oracles") == 3
        finally:
            monkeypatch.setattr(nmpg.prox, "prox_l0", original)

    def test_filter_selects_subset(self, capsys):
        assert cmd_check("rate_fit") == 0
        out = capsys.readouterr().out
        assert "rate_fit_sanity" in out
        assert "gradient_checks" not in out


class TestMain:
    def test_run_subcommand(self, tmp_path):
        config = dict(BASE_CONFIG, out_dir=str(tmp_path / "out"))
        path = write_config(tmp_path, config)
        assert main(["run", "--config", str(path)]) == 0

    def test_check_subcommand_with_filter(self):
        assert main(["check", "--filter", "m_constant"]) == 0


class TestParallelism:
    def test_jobs_env_override(self, monkeypatch):
        from nmpg.cli import _n_jobs

        monkeypatch.setenv("NMPG_JOBS", "2")
        assert _n_jobs(8) == 2
        monkeypatch.setenv("NMPG_JOBS", "not-a-number")
        assert _n_jobs(8) >= 1

    def test_parallel_repeats_stay_deterministic(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NMPG_JOBS", "4")
        config = dict(
            BASE_CONFIG,
            problem={"kind": "lasso_general", "dim": 8, "seed": 0, "lambda": 0.1},
            x0={"policy": "seeded", "seed": 100},
            repeats=4,
        )
        path = write_config(tmp_path, config)
        assert cmd_run(path, out_dir=str(tmp_path / "p1")) == 0
        assert cmd_run(path, out_dir=str(tmp_path / "p2")) == 0
        for i in range(4):
            name = f"trace_{i:03d}.csv"
            assert (tmp_path / "p1" / name).read_bytes() == (
                tmp_path / "p2" / name
            ).read_bytes()
