"""CLI harness: exit codes, determinism, serialization, config handling."""

import io
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

from prodexp.expansion import ExpansionCertificate, verify_certificate
from prodexp.gf_poly import field_make
from prodexp.codes import rs_primitive
from prodexp.harness import (
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    ExperimentConfig,
    build_parser,
    config_from_args,
    emit_report,
    main,
    make_record,
    run,
)
from prodexp.tensor import CodeFamily


def run_cli(argv, tmp_path=None):
    """Invoke the harness in-process, capturing stdout."""
    buf = io.StringIO()
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    code = run(cfg, stream=buf)
    return code, buf.getvalue()


# ----------------------------------------------------------------------
# Exit codes.
# ----------------------------------------------------------------------

def test_malformed_flag_exits_2(capsys):
    assert main(["robustness", "--no-such-flag"]) == EXIT_USAGE
    capsys.readouterr()


def test_unknown_instance_exits_2(capsys):
    assert main(["rho-exact", "--instance", "nope", "--m", "2"]) == EXIT_USAGE
    capsys.readouterr()


def test_sampled_requires_seed(capsys):
    assert main(["robustness", "--instance", "rep2", "--m", "2", "--mode", "sampled"]) == EXIT_USAGE
    capsys.readouterr()


def test_exact_mode_rejects_seed(capsys):
    rc = main(
        ["robustness", "--instance", "rep2", "--m", "2", "--mode", "exact", "--seed", "1"]
    )
    assert rc == EXIT_USAGE
    capsys.readouterr()


def test_check_lemmas_rep2_exits_0():
    code, out = run_cli(["check-lemmas", "--instance", "rep2", "--m", "2"])
    assert code == EXIT_OK
    records = [json.loads(line) for line in out.splitlines()]
    assert records and all(r["holds"] for r in records)


def test_violation_exit_code_from_failed_check(monkeypatch):
    from prodexp import harness
    from prodexp.testability import CheckReport

    def rigged(cfg):
        rep = CheckReport(
            name="rigged",
            instance="x",
            quantities={},
            inequalities=(("impossible", Fraction(0), Fraction(1)),),
        )
        recs = harness.records_from_check(rep)
        return (EXIT_VIOLATION if not rep.holds else EXIT_OK), recs, []

    monkeypatch.setitem(harness._RUNNERS, "check-lemmas", rigged)
    cfg = ExperimentConfig(command="check-lemmas")
    assert harness.run(cfg, stream=io.StringIO()) == EXIT_VIOLATION


# ----------------------------------------------------------------------
# Reports.
# ----------------------------------------------------------------------

def test_emit_report_empty_jsonlines_and_csv():
    buf = io.StringIO()
    emit_report([], "jsonlines", buf)
    assert buf.getvalue() == ""
    buf = io.StringIO()
    emit_report([], "csv", buf)
    assert buf.getvalue().startswith("kind,quantity,value,mode,instance")
    assert len(buf.getvalue().splitlines()) == 1


def test_emit_report_single_exact_record_golden():
    rec = make_record(
        kind="test", quantity="rho_r", value="1/2", mode="exact", instance="rep2"
    )
    buf = io.StringIO()
    emit_report([rec], "jsonlines", buf)
    assert buf.getvalue() == (
        '{"kind":"test","quantity":"rho_r","value":"1/2","mode":"exact",'
        '"instance":"rep2","test":"","seed":null,"samples":null,'
        '"holds":null,"detail":""}\n'
    )
    buf = io.StringIO()
    emit_report([rec], "csv", buf)
    lines = buf.getvalue().splitlines()
    assert lines[1] == "test,rho_r,1/2,exact,rep2,,,,,"


def test_reports_byte_identical_across_runs(tmp_path):
    argv = [
        "robustness",
        "--instance",
        "rep2",
        "--m",
        "3",
        "--mode",
        "sampled",
        "--samples",
        "10",
        "--seed",
        "77",
    ]
    code1, out1 = run_cli(argv)
    code2, out2 = run_cli(argv)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2


def test_jobs_do_not_change_output():
    base = [
        "robustness",
        "--instance",
        "rep2",
        "--m",
        "2",
        "--mode",
        "sampled",
        "--samples",
        "6",
        "--seed",
        "5",
    ]
    _, out1 = run_cli(base + ["--jobs", "1"])
    _, out2 = run_cli(base + ["--jobs", "2"])
    assert out1 == out2


def test_out_flag_writes_report_file(tmp_path):
    out = tmp_path / "report.csv"
    argv = [
        "constants",
        "--m",
        "3",
        "--format",
        "csv",
        "--out",
        str(out),
    ]
    parser = build_parser()
    cfg = config_from_args(parser.parse_args(argv))
    assert run(cfg, stream=io.StringIO()) == EXIT_OK
    text = out.read_text()
    assert "alpha_r,1/2916" in text


def test_config_file_flags_win(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"instance": "rep2", "m": 2}))
    parser = build_parser()
    args = parser.parse_args(
        ["rho-exact", "--config", str(cfg_file), "--m", "3"]
    )
    cfg = config_from_args(args)
    assert cfg.instance == "rep2"
    assert cfg.m == 3  # flag beats config


# ----------------------------------------------------------------------
# Certificates through the CLI.
# ----------------------------------------------------------------------

def test_certify_counterexample_writes_verifiable_file(tmp_path):
    out = tmp_path / "t1.cert"
    code, report = run_cli(
        ["certify-counterexample", "--instance", "rs", "--t", "1", "--out", str(out)]
    )
    assert code == EXIT_OK
    rec = json.loads(report.splitlines()[0])
    assert rec["value"] == "1/3" and rec["holds"] is True
    cert = ExpansionCertificate.from_text(out.read_text())
    fam = CodeFamily.power(rs_primitive(field_make(2), 1, 3), 3)
    assert verify_certificate(cert, fam)


def test_certify_counterexample_defaults_instance(tmp_path):
    out = tmp_path / "t1b.cert"
    code, _ = run_cli(["certify-counterexample", "--t", "1", "--out", str(out)])
    assert code == EXIT_OK and out.exists()


# ----------------------------------------------------------------------
# Other subcommands end to end.
# ----------------------------------------------------------------------

def test_rho_exact_cli_rep2():
    code, out = run_cli(["rho-exact", "--instance", "rep2", "--m", "2"])
    assert code == EXIT_OK
    rec = json.loads(out.splitlines()[0])
    assert rec["quantity"] == "rho" and rec["value"] == "1/2"


def test_rho_sampled_cli_gf4_triple():
    code, out = run_cli(
        ["rho-sampled", "--instance", "rs", "--t", "1", "--m", "3", "--samples", "4", "--seed", "3"]
    )
    assert code == EXIT_OK
    recs = [json.loads(line) for line in out.splitlines()]
    cert = [r for r in recs if r["mode"] == "certificate"]
    assert cert and Fraction(*map(int, cert[0]["value"].split("/"))) <= Fraction(1, 3)


def test_agreement_cli_exact():
    code, out = run_cli(["agreement", "--instance", "rep2", "--m", "2", "--mode", "exact"])
    assert code == EXIT_OK
    rec = json.loads(out.splitlines()[0])
    assert rec["value"] == "1/2"


def test_ps_corollary_cli():
    code, out = run_cli(
        ["ps-corollary", "--instance", "rs", "--t", "2", "--trials", "20", "--seed", "4"]
    )
    assert code == EXIT_OK
    rec = json.loads(out.splitlines()[0])
    assert rec["holds"] is True


def test_constants_cli_csv_header_fixed():
    code, out = run_cli(["constants", "--m", "4", "--format", "csv"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "kind,quantity,value,mode,instance,test,seed,samples,holds,detail"
    assert any("rho^8/576" in line for line in lines)


def test_module_entrypoint_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "prodexp", "constants", "--m", "3"],
        capture_output=True,
        text=True,
        cwd=str(Path(__file__).resolve().parent.parent),
        env={"PYTHONPATH": "src", "PATH": "/usr/bin:/bin"},
    )
    assert proc.returncode == 0
    assert '"value":"1/2916"' in proc.stdout
