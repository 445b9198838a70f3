"""Command-line harness: experiment configuration, dispatch, report emission.

Subcommands (one per claim family):

  certify-counterexample  build + verify the non-expanding witness, write its
                          certificate file
  rho-exact               exact expansion constant (tiny instances)
  rho-sampled             sampled expansion upper bounds
  robustness              exact or sampled flat-test robustness
  agreement               exact or sampled agreement testability
  check-lemmas            run every applicable inequality check
  ps-corollary            planted pair-proximity conformance trials
  constants               closed-form robustness/agreement constants

Exit codes: 0 success, 1 some check reported a violation, 2 usage error.
Reports are deterministic: fixed field order, exact fractions as "p/q",
seeds and sample counts always recorded.  Flags win over the optional JSON
config file; environment variables are never consulted.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from io import StringIO
from typing import Dict, List, Optional, Sequence, Tuple

from .codes import CyclicCode, min_distance, repetition, rs_primitive
from .expansion import (
    certify_upper_bound,
    counterexample_word,
    line_disjoint_support,
    rho_exact,
    rho_upper_sampled,
    sum_contains,
)
from .gf_poly import field_make
from .tensor import CodeFamily
from .testability import (
    CheckReport,
    FlatTest,
    TestReport,
    agreement_ratio_sampled,
    check_composition,
    check_hyperplane_bound,
    check_pair_proximity,
    check_robust_agreement,
    derived_constants,
    line_test,
    rho_a_exact,
    rho_r_exact,
    rho_r_sampled_upper,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

_RECORD_FIELDS = (
    "kind",
    "quantity",
    "value",
    "mode",
    "instance",
    "test",
    "seed",
    "samples",
    "holds",
    "detail",
)


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    """Resolved invocation: instance, mode, sampling, and output options."""

    command: str
    instance: Optional[str] = None
    t: Optional[int] = None
    rate: Tuple[int, int] = (1, 3)
    m: int = 2
    k: int = 1
    mode: str = "exact"
    samples: Optional[int] = None
    trials: int = 1000
    seed: Optional[int] = None
    jobs: int = 1
    fmt: str = "jsonlines"
    out: Optional[str] = None

    def validate(self) -> None:
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if self.mode not in ("exact", "sampled"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.seed is None:
            raise UsageError("sampled mode requires --seed")
        if self.mode == "exact" and self.command in ("robustness", "agreement"):
            if self.seed is not None or self.samples is not None:
                raise UsageError("exact mode rejects --seed/--samples")


# ----------------------------------------------------------------------
# Report records.
# ----------------------------------------------------------------------

def frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _detail_str(items: Dict[str, str]) -> str:
    return ";".join(f"{k}={v}" for k, v in items.items())


def make_record(
    kind: str,
    quantity: str = "",
    value: str = "",
    mode: str = "",
    instance: str = "",
    test: str = "",
    seed: Optional[int] = None,
    samples: Optional[int] = None,
    holds: Optional[bool] = None,
    detail: str = "",
) -> Dict[str, object]:
    return {
        "kind": kind,
        "quantity": quantity,
        "value": value,
        "mode": mode,
        "instance": instance,
        "test": test,
        "seed": seed,
        "samples": samples,
        "holds": holds,
        "detail": detail,
    }


def record_from_test_report(rep: TestReport) -> Dict[str, object]:
    if isinstance(rep.value, Fraction):
        value = frac_str(rep.value)
    else:
        value = f"{frac_str(rep.value[0])}..{frac_str(rep.value[1])}"
    return make_record(
        kind="test",
        quantity=rep.quantity,
        value=value,
        mode=rep.mode,
        instance=rep.instance,
        test=rep.detail.get("test", ""),
        seed=rep.seed,
        samples=rep.sample_count,
        detail=_detail_str({k: v for k, v in rep.detail.items() if k != "test"}),
    )


def records_from_check(rep: CheckReport) -> List[Dict[str, object]]:
    out = []
    quantities = _detail_str({k: frac_str(v) for k, v in rep.quantities.items()})
    for desc, lhs, rhs in rep.inequalities:
        out.append(
            make_record(
                kind="check",
                quantity=f"{rep.name}:{desc}",
                value=f"{frac_str(lhs)}>=:{frac_str(rhs)}",
                mode=rep.mode,
                instance=rep.instance,
                seed=rep.seed,
                samples=rep.sample_count,
                holds=lhs >= rhs,
                detail=quantities,
            )
        )
    return out


def emit_report(records: Sequence[Dict[str, object]], fmt: str, stream) -> None:
    """Serialize records with deterministic field order."""
    if fmt == "jsonlines":
        for rec in records:
            ordered = {k: rec.get(k) for k in _RECORD_FIELDS}
            stream.write(json.dumps(ordered, separators=(",", ":")) + "\n")
    elif fmt == "csv":
        stream.write(",".join(_RECORD_FIELDS) + "\n")
        for rec in records:
            row = []
            for k in _RECORD_FIELDS:
                v = rec.get(k)
                if v is None:
                    row.append("")
                elif isinstance(v, bool):
                    row.append("true" if v else "false")
                else:
                    row.append(str(v).replace(",", ";"))
            stream.write(",".join(row) + "\n")
    else:
        raise UsageError(f"unknown format {fmt!r}")


# ----------------------------------------------------------------------
# Instance construction.
# ----------------------------------------------------------------------

def _build_code(cfg: ExperimentConfig) -> CyclicCode:
    if cfg.instance == "rep2":
        return repetition(field_make(1), 2)
    if cfg.instance == "rs":
        if cfg.t is None:
            raise UsageError("--t is required for the rs instance")
        field = field_make(2 * cfg.t)
        return rs_primitive(field, cfg.rate[0], cfg.rate[1])
    raise UsageError(f"unknown instance {cfg.instance!r}; choose rep2 or rs")


def _build_family(cfg: ExperimentConfig) -> CodeFamily:
    return CodeFamily.power(_build_code(cfg), cfg.m)


# ----------------------------------------------------------------------
# Subcommand runners.  Each returns (exit_code, records, files_written).
# ----------------------------------------------------------------------

def _run_certify_counterexample(cfg: ExperimentConfig):
    if cfg.t is None:
        raise UsageError("--t is required")
    field = field_make(2 * cfg.t)
    n = field.order - 1
    code = rs_primitive(field, cfg.rate[0], cfg.rate[1])
    family = CodeFamily.power(code, 3)
    word = counterexample_word(field, code.dimension)
    in_sum = sum_contains(word, family, method="check_poly")
    support_ok = word.weight() == n * n
    disjoint = line_disjoint_support(word)
    ok = in_sum and support_ok and disjoint
    records = [
        make_record(
            kind="certificate",
            quantity="rho",
            value="" if not ok else "",
            mode="certificate",
            instance=family.label(),
            detail=_detail_str(
                {
                    "sum_contains_check_poly": str(in_sum).lower(),
                    "support": str(word.weight()),
                    "expected_support": str(n * n),
                    "line_disjoint": str(disjoint).lower(),
                }
            ),
            holds=ok,
        )
    ]
    files = []
    if not ok:
        return EXIT_VIOLATION, records, files
    cert = certify_upper_bound(word, family)
    records[0]["value"] = frac_str(cert.bound)
    out = cfg.out or f"counterexample_t{cfg.t}.cert"
    with open(out, "w") as fh:
        fh.write(cert.to_text())
    files.append(out)
    return EXIT_OK, records, files


def _run_rho_exact(cfg: ExperimentConfig):
    family = _build_family(cfg)
    value = rho_exact(family)
    rep = TestReport(
        quantity="rho", value=value, mode="exact", instance=family.label()
    )
    return EXIT_OK, [record_from_test_report(rep)], []


def _run_rho_sampled(cfg: ExperimentConfig):
    if cfg.seed is None:
        raise UsageError("rho-sampled requires --seed")
    family = _build_family(cfg)
    samples = cfg.samples if cfg.samples is not None else 32
    rep = rho_upper_sampled(family, samples, cfg.seed)
    reports = []
    if rep.certified_bound is not None:
        reports.append(
            TestReport(
                quantity="rho",
                value=rep.certified_bound,
                mode="certificate",
                instance=rep.instance,
                seed=rep.seed,
                sample_count=rep.sample_count,
                detail={"upper_bound": "min_certificate_ratio"},
            )
        )
    if rep.heuristic_min is not None:
        reports.append(
            TestReport(
                quantity="rho",
                value=rep.heuristic_min,
                mode="sampled",
                instance=rep.instance,
                seed=rep.seed,
                sample_count=rep.sample_count,
                detail={"heuristic": "best_found_decomposition"},
            )
        )
    return EXIT_OK, [record_from_test_report(r) for r in reports], []


def _run_robustness(cfg: ExperimentConfig):
    family = _build_family(cfg)
    test = FlatTest.build(family.shape, cfg.k)
    if cfg.mode == "exact":
        value = rho_r_exact(test, family)
        rep = TestReport(
            quantity="rho_r",
            value=value,
            mode="exact",
            instance=family.label(),
            detail={"test": test.label()},
        )
        return EXIT_OK, [record_from_test_report(rep)], []
    if cfg.k != 1:
        raise UsageError("sampled robustness is implemented for the line test only")
    samples = cfg.samples if cfg.samples is not None else 100
    srep = rho_r_sampled_upper(test, family, samples, cfg.seed, jobs=cfg.jobs)
    rep = TestReport(
        quantity="rho_r",
        value=srep.value,
        mode="sampled",
        instance=srep.instance,
        seed=srep.seed,
        sample_count=srep.sample_count,
        detail={
            "test": srep.test,
            "pool": str(len(srep.ratios)),
            "skipped": str(srep.skipped),
        },
    )
    return EXIT_OK, [record_from_test_report(rep)], []


def _run_agreement(cfg: ExperimentConfig):
    family = _build_family(cfg)
    if cfg.mode == "exact":
        value = rho_a_exact(family)
        rep = TestReport(
            quantity="rho_a", value=value, mode="exact", instance=family.label()
        )
        return EXIT_OK, [record_from_test_report(rep)], []
    import numpy as np

    from .tensor import random_direction_word

    samples = cfg.samples if cfg.samples is not None else 32
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    best: Optional[Fraction] = None
    used = 0
    for _ in range(samples):
        tup = [
            random_direction_word(code, family.shape, axis, rng)
            for axis, code in enumerate(family.codes)
        ]
        ratio = agreement_ratio_sampled(tup, family)
        if ratio is None:
            continue
        used += 1
        if best is None or ratio < best:
            best = ratio
    if best is None:
        raise UsageError("no non-degenerate tuple was sampled")
    rep = TestReport(
        quantity="rho_a",
        value=best,
        mode="sampled",
        instance=family.label(),
        seed=cfg.seed,
        sample_count=samples,
        detail={"tuples_used": str(used), "estimate": "heuristic"},
    )
    return EXIT_OK, [record_from_test_report(rep)], []


def _run_check_lemmas(cfg: ExperimentConfig):
    code = _build_code(cfg)
    m = cfg.m
    family = CodeFamily.power(code, m)
    records: List[Dict[str, object]] = []
    reports: List[CheckReport] = []
    q = code.field.order
    word_space_small = q ** (code.length**m) <= 1 << 24

    if word_space_small:
        reports.append(check_robust_agreement(family))
        rr = rho_r_exact(line_test(family.shape), family)
        ra = rho_a_exact(family)
        reports.append(
            CheckReport(
                name="bounds",
                instance=family.label(),
                quantities={"rho_r_T1": rr, "rho_a": ra},
                inequalities=(
                    ("rho_r <= 1", Fraction(1), rr),
                    ("rho_a <= 2", Fraction(2), ra),
                ),
            )
        )
        if m >= 2:
            reports.append(check_hyperplane_bound(code, 2))
        if m >= 3:
            reports.append(check_hyperplane_bound(code, 3))
            reports.append(check_composition(code, m, 1, 2, mode="exact"))
            # chained line-test bound through the hyperplane factors
            rr21 = rho_r_exact(line_test((code.length,) * 2), CodeFamily.power(code, 2))
            delta = Fraction(min_distance(code, "exhaustive"), code.length)
            M = (m - 2) * (m + 3) // 2
            reports.append(
                CheckReport(
                    name="line_test_chain",
                    instance=family.label(),
                    quantities={"rho_r_T1": rr, "rho_r_T21": rr21, "delta": delta},
                    inequalities=(
                        (
                            f"rho_r_Tm1 >= rho_r_T21 * delta^{M} / 12^{m - 2}",
                            rr,
                            rr21 * delta**M / 12 ** (m - 2),
                        ),
                    ),
                )
            )
    elif m >= 3:
        seed = cfg.seed if cfg.seed is not None else 0
        samples = cfg.samples if cfg.samples is not None else 32
        reports.append(
            check_composition(code, m, 1, 2, mode="sampled", samples=samples, seed=seed)
        )
    else:
        raise UsageError("instance too large for the exact checks")

    violation = False
    for rep in reports:
        records.extend(records_from_check(rep))
        if not rep.holds:
            violation = True
    return (EXIT_VIOLATION if violation else EXIT_OK), records, []


def _run_ps_corollary(cfg: ExperimentConfig):
    code = _build_code(cfg)
    seed = cfg.seed if cfg.seed is not None else 0
    rep = check_pair_proximity(code, cfg.trials, seed)
    rec = make_record(
        kind="check",
        quantity="pair_proximity",
        value=f"failures={rep.failures}",
        mode="sampled",
        instance=rep.instance,
        seed=rep.seed,
        samples=rep.trials,
        holds=rep.holds,
        detail=_detail_str(
            {
                "line_budget": str(rep.line_budget),
                "max_observed_delta": frac_str(rep.max_observed_delta),
            }
        ),
    )
    return (EXIT_OK if rep.holds else EXIT_VIOLATION), [rec], []


def _run_constants(cfg: ExperimentConfig):
    c = derived_constants(cfg.m)
    records = [
        make_record(
            kind="constants",
            quantity="M",
            value=str(c.M),
            mode="exact",
            instance=f"m={cfg.m}",
        ),
        make_record(
            kind="constants",
            quantity="alpha_r",
            value=frac_str(c.alpha_r),
            mode="exact",
            instance=f"m={cfg.m}",
        ),
        make_record(
            kind="constants",
            quantity="alpha_a",
            value=frac_str(c.alpha_a),
            mode="exact",
            instance=f"m={cfg.m}",
        ),
        make_record(
            kind="constants",
            quantity="alpha",
            value=f"rho^{c.alpha_exponent}/{c.alpha_denominator}",
            mode="exact",
            instance=f"m={cfg.m}",
        ),
    ]
    return EXIT_OK, records, []


_RUNNERS = {
    "certify-counterexample": _run_certify_counterexample,
    "rho-exact": _run_rho_exact,
    "rho-sampled": _run_rho_sampled,
    "robustness": _run_robustness,
    "agreement": _run_agreement,
    "check-lemmas": _run_check_lemmas,
    "ps-corollary": _run_ps_corollary,
    "constants": _run_constants,
}


def run(config: ExperimentConfig, stream=None) -> int:
    """Dispatch a validated config; write reports; return the exit code."""
    config.validate()
    code, records, _files = _RUNNERS[config.command](config)
    buf = StringIO()
    emit_report(records, config.fmt, buf)
    payload = buf.getvalue()
    if config.command != "certify-counterexample" and config.out:
        with open(config.out, "w") as fh:
            fh.write(payload)
    elif stream is not None:
        stream.write(payload)
    else:
        sys.stdout.write(payload)
    return code


# ----------------------------------------------------------------------
# Argument parsing.
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prodexp",
        description="Product-code expansion and testability experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, instance=True, sampling=True):
        if instance:
            p.add_argument("--instance", choices=("rep2", "rs"), default=None)
            p.add_argument("--t", type=int, default=None, help="field GF(2^(2t))")
            p.add_argument("--rate", default=None, help="code rate p/q (default 1/3)")
            p.add_argument("--m", type=int, default=None, help="number of factors")
        if sampling:
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--format", dest="fmt", choices=("jsonlines", "csv"), default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--config", default=None, help="JSON config file; flags win")

    p = sub.add_parser("certify-counterexample", help="non-expanding witness certificate")
    add_common(p, sampling=False)

    p = sub.add_parser("rho-exact", help="exact expansion constant (tiny instances)")
    add_common(p, sampling=False)

    p = sub.add_parser("rho-sampled", help="sampled expansion upper bounds")
    add_common(p)

    p = sub.add_parser("robustness", help="flat-test robustness")
    add_common(p)
    p.add_argument("--k", type=int, default=None, help="flat dimension (default 1)")
    p.add_argument("--mode", choices=("exact", "sampled"), default=None)

    p = sub.add_parser("agreement", help="agreement testability")
    add_common(p)
    p.add_argument("--mode", choices=("exact", "sampled"), default=None)

    p = sub.add_parser("check-lemmas", help="run the applicable inequality checks")
    add_common(p)

    p = sub.add_parser("ps-corollary", help="planted pair-proximity trials")
    add_common(p)
    p.add_argument("--trials", type=int, default=None)

    p = sub.add_parser("constants", help="closed-form constants for m factors")
    add_common(p, instance=False, sampling=False)
    p.add_argument("--m", type=int, default=None)

    return parser


def _parse_rate(text: str) -> Tuple[int, int]:
    num, _, den = text.partition("/")
    try:
        return int(num), int(den)
    except ValueError as exc:
        raise UsageError(f"bad rate {text!r}; expected p/q") from exc


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values: Dict[str, object] = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
    for key, val in vars(args).items():
        if key in ("config",):
            continue
        if val is not None:
            values[key] = val
    cfg = ExperimentConfig(command=values["command"])
    if "instance" in values:
        cfg.instance = str(values["instance"])
    if "t" in values:
        cfg.t = int(values["t"])  # type: ignore[arg-type]
    if "rate" in values:
        rate = values["rate"]
        cfg.rate = _parse_rate(rate) if isinstance(rate, str) else (int(rate[0]), int(rate[1]))
    if "m" in values:
        cfg.m = int(values["m"])  # type: ignore[arg-type]
    if "k" in values:
        cfg.k = int(values["k"])  # type: ignore[arg-type]
    if "mode" in values:
        cfg.mode = str(values["mode"])
    if "samples" in values:
        cfg.samples = int(values["samples"])  # type: ignore[arg-type]
    if "trials" in values:
        cfg.trials = int(values["trials"])  # type: ignore[arg-type]
    if "seed" in values:
        cfg.seed = int(values["seed"])  # type: ignore[arg-type]
    if "jobs" in values:
        cfg.jobs = int(values["jobs"])  # type: ignore[arg-type]
    if "fmt" in values:
        cfg.fmt = str(values["fmt"])
    if "out" in values:
        cfg.out = str(values["out"])
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
