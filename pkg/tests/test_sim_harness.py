import json
import math
import subprocess
import sys

import pytest

from ssband.errors import ConfigError
from ssband.sim_harness import experiments as ex
from ssband.sim_harness.cli import main
from ssband.sim_harness.config import load_config, parse_lines

SMALL = {"n_grid": "2^10,2^12", "replicates": "6", "seed": "99"}


def run_cli(args, tmp_path, capsys):
    out = tmp_path / "out"
    status = main(args + ["--output_dir", str(out)])
    captured = capsys.readouterr()
    return status, out, captured


def read_report(out):
    report = json.loads((out / "report.json").read_text())
    rows = ex.rows_from_csv((out / "rows.csv").read_text())
    return report, rows


def cli_args(command, values):
    args = [command]
    for k, v in values.items():
        args += ["--" + k, str(v)]
    return args


# ---------------------------------------------------------------- config

def test_parse_lines():
    raw = parse_lines("# comment\nreplicates = 7  # trailing\n\nn_grid=2^10, 2^12\n")
    assert raw == {"replicates": "7", "n_grid": "2^10, 2^12"}
    with pytest.raises(ConfigError):
        parse_lines("bogus = 1")
    with pytest.raises(ConfigError):
        parse_lines("replicates")


def test_config_precedence(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("seed = 5\nreplicates = 3\nn_grid = 2^10,2^11\n")
    c = load_config(str(path), environ={})
    assert (c.seed, c.replicates, c.n_grid) == (5, 3, [1024, 2048])
    c = load_config(str(path), environ={"SSBAND_SEED": "17"})
    assert c.seed == 17
    c = load_config(str(path), {"seed": "23"}, environ={"SSBAND_SEED": "17"})
    assert c.seed == 23 and c.replicates == 3
    assert load_config(environ={}).seed == 20240601


@pytest.mark.parametrize("bad", [{"replicates": "0"}, {"n_grid": "2^12,2^10"},
                                 {"gamma": "abc"}, {"model": "poisson"},
                                 {"function_source": "custom_file"}, {"n_grid": "8"}])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        load_config(overrides=bad, environ={})


def test_config_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/file.cfg", environ={})


# ---------------------------------------------------------------- cli

def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["status"] == 2
    assert main([]) == 2


def test_missing_config_file(tmp_path, capsys):
    status, out, cap = run_cli(["coverage", "--config", str(tmp_path / "none.cfg")],
                               tmp_path, capsys)
    assert status == 2
    assert json.loads(cap.err)["error"] == "ConfigError"
    assert json.loads((out / "error.json").read_text())["status"] == 2


def test_bad_flag_value(tmp_path, capsys):
    status, _, _ = run_cli(["coverage", "--replicates", "many"], tmp_path, capsys)
    assert status == 2


def test_haar_fails_gate(tmp_path, capsys):
    status, out, cap = run_cli(cli_args("coverage", dict(SMALL, family="haar-test", N=1)),
                               tmp_path, capsys)
    assert status == 3
    assert json.loads(cap.err)["error"] == "Assumption2Failed"


def test_basis_info(capsys):
    assert main(["basis-info", "--family", "daubechies", "--N", "6"]) == 0
    info = json.loads(capsys.readouterr().out)
    for key in ("t0", "sigma2_max", "sigma2_curvature", "upsilon", "tau"):
        assert math.isfinite(info[key])
    assert info["assumption2"]["passed"] is True


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ssband.sim_harness", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


# ---------------------------------------------------------------- experiments

def test_coverage_outputs(tmp_path, capsys):
    status, out, _ = run_cli(cli_args("coverage", SMALL), tmp_path, capsys)
    assert status == 0
    report, rows = read_report(out)
    header = (out / "rows.csv").read_text().split("\n")[0].split(",")
    assert header == ["n", "rep", "covered", "radius", "level", "s_hat", "M_hat",
                      "flags", "seed"]
    assert len(rows) == 2 * 6 == report["rows"]
    band_header = (out / "band.csv").read_text().split("\n")[0]
    assert band_header == "t,center,lo,hi"
    # aggregates recomputed from the CSV rows match the report exactly
    config = load_config(overrides=dict(SMALL, experiment="coverage"), environ={})
    assert ex._jsonable(ex.aggregate("coverage", rows, config)) == report["aggregates"]
    # every row is re-runnable from its own seed
    ctx = ex.Context.build(config)
    for row in rows[:3]:
        again = ex.band_replicate(ctx, (row["n"], row["rep"], row["seed"]))
        assert again["covered"] == row["covered"] and again["radius"] == row["radius"]


def test_rows_independent_of_workers(tmp_path):
    config = load_config(overrides=dict(SMALL, experiment="coverage"), environ={})
    serial = ex.rows_to_csv(ex.run_coverage(config).rows, ex.BAND_HEADER)
    pooled = ex.rows_to_csv(ex.run_coverage(config.replace(workers=2)).rows, ex.BAND_HEADER)
    assert serial == pooled


@pytest.mark.parametrize("source", ["prop1", "pi_sample"])
def test_zero_noise_coverage(source):
    # noiseless coefficients: the band around the truth always contains it
    from ssband.observation_models import NoisyCoefficients
    config = load_config(overrides={"experiment": "coverage", "function_source": source},
                         environ={})
    ctx = ex.Context.build(config)
    n = 2 ** 16
    for rep in range(50):
        f = ctx.truth(n, ex.derived_seed(1, n, rep))
        obs = NoisyCoefficients("white_noise", n, float("nan"), f)
        band = ctx.band(obs, n)
        assert ex.band_contains(band, f, profile=ctx.profile)


def test_infinite_radius_counts_as_covered():
    rows = [{"n": 1024, "rep": 0, "covered": True, "radius": math.inf, "flags": "infinite_radius"},
            {"n": 1024, "rep": 1, "covered": False, "radius": 1.0, "flags": ""}]
    agg = ex.aggregate("coverage", rows, {"gamma": 0.1})
    assert agg["non_coverage_rate"] == 0.5
    assert agg["per_n"]["1024"]["infinite_radius_rate"] == 0.5


def test_exactness_excludes_clamped():
    rows = [{"n": 1024, "rep": i, "covered": i != 0, "radius": 1.0,
             "flags": "clamped" if i < 2 else ""} for i in range(4)]
    agg = ex.aggregate("exactness", rows, {"gamma": 0.1})
    entry = agg["per_n"]["1024"]
    assert entry["used"] == 2 and entry["excluded_clamped"] == 2
    assert entry["non_coverage_rate"] == 0.0


@pytest.mark.parametrize("s,target", [(1.0, -1 / 3), (3.0, -3 / 7)])
def test_rate_targets(s, target):
    rows = [{"n": n, "radius": n ** target} for n in (2 ** 10, 2 ** 12, 2 ** 14, 2 ** 16)]
    agg = ex.aggregate("rates", rows, {"s": s, "band_kind": "adaptive"})
    assert agg["target_slope"] == pytest.approx(target)


def test_rates_needs_wide_grid():
    config = load_config(overrides=dict(SMALL, experiment="rates"), environ={})
    with pytest.raises(ConfigError):
        ex.run_rates(config)


@pytest.mark.parametrize("model", ["density", "regression"])
def test_other_models(tmp_path, capsys, model):
    status, out, _ = run_cli(cli_args("coverage", dict(SMALL, model=model, replicates=2)),
                             tmp_path, capsys)
    assert status == 0
    report, rows = read_report(out)
    assert len(rows) == 4 and all(r["covered"] is not None for r in rows)


@pytest.mark.parametrize("source", ["prop1", "minimax_pair"])
def test_sparse_sources(tmp_path, capsys, source):
    status, _, _ = run_cli(cli_args("coverage", dict(SMALL, function_source=source,
                                                     replicates=2)), tmp_path, capsys)
    assert status == 0


def test_custom_file_source(tmp_path, capsys):
    from ssband.function_space import SmoothnessClass, sample_pi
    field = sample_pi(SmoothnessClass(1.0, 1.0), 12, 1, j0=0, self_similar=True)
    path = tmp_path / "f.json"
    path.write_text(field.to_json())
    status, _, _ = run_cli(cli_args("coverage", dict(SMALL, function_source="custom_file",
                                                     function_file=path, replicates=2)),
                           tmp_path, capsys)
    assert status == 0


def test_smoothness_experiment(tmp_path, capsys):
    status, out, _ = run_cli(cli_args("smoothness", SMALL), tmp_path, capsys)
    assert status == 0
    report, rows = read_report(out)
    agg = report["aggregates"]
    assert 0.0 <= agg["freq_s_hat_le_s"] <= 1.0


def test_gumbel_experiment(tmp_path, capsys):
    status, out, _ = run_cli(cli_args("gumbel", {"n_grid": "2^16", "replicates": 200,
                                                 "levels": "6,8"}), tmp_path, capsys)
    assert status == 0
    report, rows = read_report(out)
    assert set(report["aggregates"]["per_level"]) == {"6", "8"}
    assert len(rows) == 400
    config = load_config(overrides={"experiment": "gumbel"}, environ={})
    assert ex._jsonable(ex.aggregate("gumbel", rows, config)) == report["aggregates"]


def test_testing_bound_trivial_case():
    report = ex.run_testing_bound(0.0, 0.0, 10, 500, 1, thresholds=(1.0,))
    assert report.aggregates["bound"] == 1.0
    assert report.rows[0]["error_sum"] == 1.0


def test_testing_bound_monotone():
    vals = [ex.testing_bound_value(mu, 0.0, 100) for mu in (0.0, 0.5, 1.0, 2.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    vals = [ex.testing_bound_value(0.5, xi, 100) for xi in (0.0, 0.2, 0.4)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert ex.testing_bound_value(math.sqrt(math.log(2)), 0.0, 100) == pytest.approx(0.9)


def test_testing_bound_cli(tmp_path, capsys):
    status, out, _ = run_cli(["testing-bound", "--replicates", "300"], tmp_path, capsys)
    assert status == 0
    assert "bound_check" in read_report(out)[0]["aggregates"]


def test_adversarial_experiment(tmp_path, capsys):
    status, out, _ = run_cli(cli_args("adversarial", {"n_grid": "2^10", "replicates": 2}),
                             tmp_path, capsys)
    assert status == 0
    report, rows = read_report(out)
    seq = report["sequence"]
    assert all(seq["window_check"])
    assert all(a > b for a, b in zip(seq["s_values"], seq["s_values"][1:]))
    assert len(rows) == 3 * 2
