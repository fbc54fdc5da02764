"""Command-line front end.

Eight subcommands over the library: digit emission, block statistics,
transducer analysis, martingale analysis, representation-system
complexity, dimension estimation, packaged experiments (single or
batched from a config file), and digit caching.

Conventions: machine-readable data (CSV or bare values) goes to stdout,
human-readable summaries to stderr; `--outdir DIR` additionally writes
the CSV, the text report, and a rendered PNG figure into DIR with
atomic replaces.  Exit codes: 0 success, 1 failed check, 2 usage or
config error, 3 exhausted resource budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import re
import sys
import tempfile
from types import SimpleNamespace

from .blockstats import NormalityReport, normality_profile
from .config import SUBCOMMANDS, load_config, parse_codec, parse_fspec, resolve_job_argv
from .dimension import DimProfile, default_codecs, dim_profile
from .errors import (
    BudgetExceededError,
    CheckFailure,
    ConfigError,
    MachineParseError,
    NormlabError,
    SpecError,
)
from .experiments import (
    ExperimentResult,
    run_closure_experiments,
    run_compose_identity_suite,
    run_interleave_experiment,
    run_separation_example,
)
from .martingale import (
    SuccessProfile,
    capital,
    capital_log2,
    fairness_check,
    load_martingale,
    success_profile,
)
from .numstream import (
    append_digit_cache,
    digits,
    parse_spec,
    read_digit_cache,
    spec_to_str,
    write_digit_cache,
)
from .repsys import ComplexitySeries, strong_profile, weak_profile
from .transducer import (
    NOT_AN_OUTPUT,
    DEFAULT_BUDGET,
    input_complexity_profile,
    load_transducer,
    min_input_length,
)
from .transducer import run as run_machine

# ---------------------------------------------------------------------------
# small helpers


def _info(msg: str) -> None:
    print(msg, file=sys.stderr)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise ValueError("empty integer list")
    return values


def _float_list(text: str) -> list[float]:
    values = [float(part) for part in text.split(",") if part]
    if not values:
        raise ValueError("empty list")
    return values


def _parse_word(text: str, base: int) -> list[int]:
    if text == "-":
        return []
    if "," in text or base > 10:
        word = [int(part) for part in text.split(",") if part != ""]
    else:
        word = [int(ch) for ch in text]
    for d in word:
        if not 0 <= d < base:
            raise ValueError(f"digit {d} out of range for base {base}")
    return word


def _format_word(word, base: int) -> str:
    if not word:
        return "-"
    if base <= 10:
        return "".join(str(d) for d in word)
    return ",".join(str(d) for d in word)


def _print_csv(header, rows) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _atomic_write(path: str, data) -> None:
    directory = os.path.dirname(path) or "."
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Outputs:
    """Writes csv/text/figure artifacts for one job into --outdir."""

    def __init__(self, outdir: str | None, stem: str):
        self.outdir = outdir
        self.stem = stem
        if outdir:
            os.makedirs(outdir, exist_ok=True)

    def _path(self, suffix: str) -> str:
        return os.path.join(self.outdir, f"{self.stem}.{suffix}")

    def csv(self, header, rows) -> None:
        if not self.outdir:
            return
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        _atomic_write(self._path("csv"), buf.getvalue())

    def text(self, content: str) -> None:
        if self.outdir:
            _atomic_write(self._path("txt"), content + "\n")

    def figure(self, render) -> None:
        if not self.outdir:
            return
        path = self._path("png")
        fd, tmp = tempfile.mkstemp(dir=self.outdir, prefix=".tmp-", suffix=".png")
        os.close(fd)
        try:
            render(tmp)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_digits(args) -> int:
    spec = parse_spec(args.spec)
    ds = digits(spec, args.base, args.n)
    print(_format_word(ds.digits, args.base))
    _info(f"{args.n} digits of {spec_to_str(spec)} in base {args.base}")
    out = _Outputs(args.outdir, "digits")
    if out.outdir:
        _atomic_write(out._path("txt"), _format_word(ds.digits, args.base) + "\n")
    return 0


def _cmd_blocks(args) -> int:
    spec = parse_spec(args.spec)
    report = normality_profile(spec, args.base, args.k, _int_list(args.n))
    rows = list(report.csv_rows())
    _print_csv(NormalityReport.CSV_HEADER, rows)
    _info(report.to_text())
    out = _Outputs(args.outdir, "blocks")
    out.csv(NormalityReport.CSV_HEADER, rows)
    out.text(report.to_text())
    from .figures import save_normality_figure

    out.figure(lambda p: save_normality_figure(report, p))
    return 0


def _cmd_transducer_run(args) -> int:
    machine = load_transducer(args.machine)
    word = _parse_word(args.input, machine.base)
    print(_format_word(run_machine(machine, word), machine.base))
    return 0


def _cmd_transducer_cd(args) -> int:
    machine = load_transducer(args.machine)
    target = _parse_word(args.target, machine.base)
    value = min_input_length(machine, target)
    print("not-an-output" if value == NOT_AN_OUTPUT else value)
    return 0


def _cmd_transducer_cnd(args) -> int:
    machine = load_transducer(args.machine)
    spec = parse_spec(args.spec)
    grid = _int_list(args.n)
    entries = input_complexity_profile(machine, spec, grid, args.budget)
    if len(entries) == 1:
        print(entries[0].value)
    else:
        _print_csv(
            ("machine", "spec", "n", "value", "cap_hit"),
            [
                (args.machine, spec_to_str(spec), e.n, e.value, int(e.cap_hit))
                for e in entries
            ],
        )
    _info(
        f"approx input complexity of {spec_to_str(spec)} under {args.machine}: "
        + ", ".join(f"n={e.n}:{e.value}" for e in entries)
    )
    out = _Outputs(args.outdir, "cnd")
    out.csv(
        ("machine", "spec", "n", "value", "cap_hit"),
        [(args.machine, spec_to_str(spec), e.n, e.value, int(e.cap_hit)) for e in entries],
    )
    from .figures import save_profile_figure

    shim = SimpleNamespace(label=os.path.basename(args.machine), entries=entries)
    out.figure(lambda p: save_profile_figure([shim], p))
    return 0


def _cmd_martingale_check(args) -> int:
    machine = load_martingale(args.machine)
    violations = fairness_check(machine)
    if violations:
        for v in violations:
            print(v)
        _info(f"{len(violations)} fairness violation(s) in {args.machine}")
        return 1
    _info(f"{args.machine} satisfies the fairness identity")
    return 0


def _cmd_martingale_capital(args) -> int:
    machine = load_martingale(args.machine)
    if args.word is not None:
        word = _parse_word(args.word, machine.base)
    elif args.spec is not None and args.n is not None:
        word = digits(parse_spec(args.spec), machine.base, args.n).digits
    else:
        raise ValueError("need --word, or --spec with --n")
    values = capital(machine, word)
    final = values[-1]
    if isinstance(final, float):
        print(f"log2={final:.6f}")
    else:
        print(final)
    _info(f"capital after {len(word)} digits")
    out = _Outputs(args.outdir, "capital")
    lgs = capital_log2(machine, word)
    out.csv(("n", "log2_capital"), list(enumerate(lgs)))
    return 0


def _cmd_martingale_profile(args) -> int:
    machine = load_martingale(args.machine)
    spec = parse_spec(args.spec)
    profile = success_profile(
        machine,
        spec,
        args.n,
        eps_values=tuple(_float_list(args.eps)),
        settle_in=args.settle_in,
    )
    rows = list(profile.csv_rows())
    _print_csv(SuccessProfile.CSV_HEADER, rows)
    _info(profile.to_text())
    out = _Outputs(args.outdir, "capital")
    out.csv(SuccessProfile.CSV_HEADER, rows)
    out.text(profile.to_text())
    from .figures import save_capital_figure

    out.figure(lambda p: save_capital_figure(profile, p))
    return 0


def _load_system(args):
    return parse_fspec(args.f, args.base, root=".")


def _emit_series(series_list: list[ComplexitySeries], args, stem: str) -> None:
    rows = [row for series in series_list for row in series.csv_rows()]
    if len(series_list) == 1 and len(series_list[0].entries) == 1:
        print(series_list[0].entries[0].value)
    else:
        _print_csv(ComplexitySeries.CSV_HEADER, rows)
    for series in series_list:
        _info(series.to_text())
    out = _Outputs(args.outdir, stem)
    out.csv(ComplexitySeries.CSV_HEADER, rows)
    out.text("\n\n".join(s.to_text() for s in series_list))
    from .figures import save_profile_figure

    out.figure(lambda p: save_profile_figure(series_list, p))


def _cmd_repsys_cfn(args) -> int:
    spec = parse_spec(args.spec)
    system = _load_system(args)
    series = weak_profile(
        spec, system, _int_list(args.n), tuple(_float_list(args.eps)), args.budget
    )
    _emit_series([series], args, "cfn")
    return 0


def _cmd_repsys_cfnd(args) -> int:
    spec = parse_spec(args.spec)
    system = _load_system(args)
    machine = load_transducer(args.machine)
    label = os.path.basename(args.machine)
    profiles = strong_profile(
        spec,
        system,
        {label: machine},
        _int_list(args.n),
        tuple(_float_list(args.eps)),
        args.budget,
    )
    _emit_series(list(profiles.values()), args, "cfnd")
    return 0


def _cmd_repsys_weak(args) -> int:
    return _cmd_repsys_cfn(args)


def _cmd_repsys_strong(args) -> int:
    spec = parse_spec(args.spec)
    system = _load_system(args)
    machines = {}
    for item in args.machine:
        label, eq, path = item.rpartition("=")
        label = label or os.path.basename(path)
        machines[label] = load_transducer(path)
    profiles = strong_profile(
        spec,
        system,
        machines,
        _int_list(args.n),
        tuple(_float_list(args.eps)),
        args.budget,
    )
    _emit_series(list(profiles.values()), args, "strong")
    return 0


def _cmd_dim(args) -> int:
    spec = parse_spec(args.spec)
    if args.codecs:
        codecs = [parse_codec(c, args.base, ".") for c in args.codecs.split(",")]
    else:
        codecs = default_codecs(args.base)
    profile = dim_profile(spec, args.base, _int_list(args.n), codecs)
    rows = list(profile.csv_rows())
    _print_csv(DimProfile.CSV_HEADER, rows)
    _info(profile.to_text())
    out = _Outputs(args.outdir, "dim")
    out.csv(DimProfile.CSV_HEADER, rows)
    out.text(profile.to_text())
    from .figures import save_dim_figure

    out.figure(lambda p: save_dim_figure(profile, p))
    return 0


def _emit_experiments(results: list[ExperimentResult], args) -> int:
    rows = [row for r in results for row in r.csv_rows()]
    _print_csv(ExperimentResult.CSV_HEADER, rows)
    for r in results:
        _info(r.to_text())
    stem = "experiment" if len(results) > 1 else f"experiment-{results[0].name}"
    out = _Outputs(args.outdir, stem)
    out.csv(ExperimentResult.CSV_HEADER, rows)
    out.text("\n\n".join(r.to_text() for r in results))
    return 0 if all(r.verdict for r in results) else 1


def _cmd_experiment_separation(args) -> int:
    return _emit_experiments([run_separation_example(args.base, args.nmax)], args)


def _cmd_experiment_interleave(args) -> int:
    result = run_interleave_experiment(args.n, args.z_threshold, args.part_floor)
    return _emit_experiments([result], args)


def _cmd_experiment_closure(args) -> int:
    result = run_closure_experiments(args.nmax, args.shift_nmax)
    return _emit_experiments([result], args)


def _cmd_experiment_compose(args) -> int:
    result = run_compose_identity_suite(args.trials, args.seed)
    return _emit_experiments([result], args)


def _cmd_experiment_all(args) -> int:
    results = [
        run_separation_example(),
        run_interleave_experiment(),
        run_closure_experiments(),
        run_compose_identity_suite(seed=args.seed),
    ]
    return _emit_experiments(results, args)


def _cmd_experiment_batch(args) -> int:
    cfg = load_config(args.config)
    worst = 0
    for index, job in enumerate(cfg.jobs, start=1):
        argv = resolve_job_argv(cfg, job)
        if cfg.outdir and "--outdir" not in argv:
            argv += ["--outdir", os.path.join(cfg.outdir, f"job{index:02d}")]
        if (
            argv[:2] in (["experiment", "compose"], ["experiment", "all"])
            and "--seed" not in argv
        ):
            argv += ["--seed", str(cfg.seed)]
        _info(f"job {index:02d} (line {job.line_no}): {' '.join(argv)}")
        code = main(argv)
        if code >= 2:
            raise ConfigError(f"job exited with code {code}", job.line_no)
        worst = max(worst, code)
    return worst


def _cache_path(args, spec_string: str) -> str:
    if args.path:
        return args.path
    directory = args.dir or os.environ.get("NORMLAB_CACHE_DIR") or "normlab-cache"
    safe = re.sub(r"[^A-Za-z0-9._-]", "_", spec_string)
    return os.path.join(directory, f"{safe}.b{args.base}.digits")


def _cmd_cache(args) -> int:
    spec = parse_spec(args.spec)
    spec_string = spec_to_str(spec)
    path = _cache_path(args, spec_string)
    if os.path.exists(path):
        base0, spec0, have = read_digit_cache(path)
        if base0 != args.base or spec0 != spec_string:
            raise ValueError(
                f"cache file {path} holds {spec0!r} base {base0}, "
                f"not {spec_string!r} base {args.base}"
            )
        if len(have) >= args.n:
            action = f"served from cache ({len(have)} digits on hand)"
        else:
            fresh = digits(spec, args.base, args.n).digits
            append_digit_cache(path, args.base, fresh[len(have) :])
            action = f"extended from {len(have)} to {args.n} digits"
    else:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        write_digit_cache(path, args.base, spec_string, digits(spec, args.base, args.n).digits)
        action = f"written fresh with {args.n} digits"
    print(path)
    _info(f"{spec_string} base {args.base}: {action}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normlab",
        description="Digit streams, finite-state analyzers, and normality experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="|".join(SUBCOMMANDS))

    common_out = argparse.ArgumentParser(add_help=False)
    common_out.add_argument(
        "--outdir", help="also write CSV, text report, and PNG figure into this directory"
    )
    common_budget = argparse.ArgumentParser(add_help=False)
    common_budget.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_BUDGET,
        help="node budget for enumeration searches (exit 3 when exceeded)",
    )

    p = sub.add_parser(
        "digits",
        parents=[common_out],
        help="emit a digit prefix",
        description="Prints the first n base-b digits of the spec to stdout.",
    )
    p.add_argument("--spec", required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=_cmd_digits)

    p = sub.add_parser(
        "blocks",
        parents=[common_out],
        help="block-frequency discrepancies",
        description="CSV columns: spec,base,k,n,discrepancy_num,discrepancy_den.",
    )
    p.add_argument("--spec", required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--k", type=int, required=True, help="largest block length")
    p.add_argument("--n", required=True, help="comma-separated prefix lengths")
    p.set_defaults(handler=_cmd_blocks)

    p = sub.add_parser("transducer", help="run machines and input complexities")
    tsub = p.add_subparsers(dest="subcommand", required=True)
    q = tsub.add_parser("run", description="Run a transducer on an input word.")
    q.add_argument("--machine", required=True, help="transducer file")
    q.add_argument("--input", required=True, help="input word ('-' for empty)")
    q.set_defaults(handler=_cmd_transducer_run)
    q = tsub.add_parser(
        "cd", description="Length of the shortest input mapping exactly to the target."
    )
    q.add_argument("--machine", required=True)
    q.add_argument("--target", required=True)
    q.set_defaults(handler=_cmd_transducer_cd)
    q = tsub.add_parser(
        "cnd",
        parents=[common_out, common_budget],
        description="Shortest input landing within base^-n of the spec. "
        "CSV columns: machine,spec,n,value,cap_hit.",
    )
    q.add_argument("--machine", required=True)
    q.add_argument("--spec", required=True)
    q.add_argument("--n", required=True, help="comma-separated precisions")
    q.set_defaults(handler=_cmd_transducer_cnd)

    p = sub.add_parser("martingale", help="fairness checks and capital dynamics")
    msub = p.add_subparsers(dest="subcommand", required=True)
    q = msub.add_parser(
        "check", description="Verify the fairness identity; exit 1 on violations."
    )
    q.add_argument("--machine", required=True, help="martingale file")
    q.set_defaults(handler=_cmd_martingale_check)
    q = msub.add_parser(
        "capital",
        parents=[common_out],
        description="Capital after betting through a word. CSV columns: n,log2_capital.",
    )
    q.add_argument("--machine", required=True)
    q.add_argument("--word", help="explicit digit word")
    q.add_argument("--spec", help="stream to bet on (with --n)")
    q.add_argument("--n", type=int)
    q.set_defaults(handler=_cmd_martingale_capital)
    q = msub.add_parser(
        "profile",
        parents=[common_out],
        description="log2-capital growth against eps*n lines. "
        "CSV columns: spec,base,n,log2_capital.",
    )
    q.add_argument("--machine", required=True)
    q.add_argument("--spec", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--eps", default="0.05", help="comma-separated slopes")
    q.add_argument("--settle-in", type=int, default=1000, dest="settle_in")
    q.set_defaults(handler=_cmd_martingale_profile)

    p = sub.add_parser("repsys", help="representation-system name complexities")
    rsub = p.add_subparsers(dest="subcommand", required=True)
    for name, needs_machine, handler, desc in (
        ("cfn", False, _cmd_repsys_cfn, "Shortest name length at precision n."),
        (
            "cfnd",
            True,
            _cmd_repsys_cfnd,
            "Shortest transducer-input length producing a name at precision n.",
        ),
        (
            "weak",
            False,
            _cmd_repsys_weak,
            "Name-length profile over an n grid with compression flags.",
        ),
        (
            "strong",
            True,
            _cmd_repsys_strong,
            "Transduced profiles for one or more machines (LABEL=FILE).",
        ),
    ):
        q = rsub.add_parser(
            name,
            parents=[common_out, common_budget],
            description=desc
            + " CSV columns: label,spec,n,value,cap_hit,ratio_num,ratio_den.",
        )
        q.add_argument("--spec", required=True)
        q.add_argument("--base", type=int, required=True)
        q.add_argument(
            "--f",
            default="identity",
            help="representation system (identity | affine:Q:R[:inner] | "
            "tabular:PATH | composed:PATH[:inner] | staged:K[:inner])",
        )
        q.add_argument("--n", required=True, help="precision or comma-separated grid")
        q.add_argument("--eps", default="0.05")
        if needs_machine:
            q.add_argument(
                "--machine",
                required=True,
                action="append" if name == "strong" else None,
                help="transducer file" + (" (repeatable, LABEL=FILE)" if name == "strong" else ""),
            )
        q.set_defaults(handler=handler)

    p = sub.add_parser(
        "dim",
        parents=[common_out],
        help="codec-based dimension estimates",
        description="CSV columns: spec,base,n,codec,k_m,ratio.",
    )
    p.add_argument("--spec", required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--n", required=True, help="comma-separated prefix lengths")
    p.add_argument(
        "--codecs",
        help="comma-separated codec names (passthrough|runlength|lz|repsys:SYSTEM); "
        "default registers all four",
    )
    p.set_defaults(handler=_cmd_dim)

    p = sub.add_parser(
        "experiment",
        help="packaged experiments with pass/fail checks",
        description="Exit 0 when every check passes, 1 otherwise. "
        "CSV columns: experiment,check,expected,observed,passed.",
    )
    esub = p.add_subparsers(dest="subcommand", required=True)
    q = esub.add_parser("separation", parents=[common_out])
    q.add_argument("--base", type=int, default=3)
    q.add_argument("--nmax", type=int, default=12)
    q.set_defaults(handler=_cmd_experiment_separation)
    q = esub.add_parser("interleave", parents=[common_out])
    q.add_argument("--n", type=int, default=10_000)
    q.add_argument("--z-threshold", type=float, default=0.02, dest="z_threshold")
    q.add_argument("--part-floor", type=float, default=0.2, dest="part_floor")
    q.set_defaults(handler=_cmd_experiment_interleave)
    q = esub.add_parser("closure", parents=[common_out])
    q.add_argument("--nmax", type=int, default=10)
    q.add_argument("--shift-nmax", type=int, default=14, dest="shift_nmax")
    q.set_defaults(handler=_cmd_experiment_closure)
    q = esub.add_parser("compose", parents=[common_out])
    q.add_argument("--trials", type=int, default=40)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(handler=_cmd_experiment_compose)
    q = esub.add_parser("all", parents=[common_out])
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(handler=_cmd_experiment_all)
    q = esub.add_parser("batch", description="Run every job in a config file.")
    q.add_argument("--config", required=True)
    q.set_defaults(handler=_cmd_experiment_batch)

    p = sub.add_parser(
        "cache",
        help="write or extend a digit cache file",
        description="Idempotent: re-requests shorter than the cache leave the "
        "file byte-identical; longer ones append. NORMLAB_CACHE_DIR sets the "
        "default directory.",
    )
    p.add_argument("--spec", required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--path", help="explicit cache file path")
    p.add_argument("--dir", help="cache directory (default: $NORMLAB_CACHE_DIR or ./normlab-cache)")
    p.set_defaults(handler=_cmd_cache)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.handler(args)
    except BudgetExceededError as exc:
        _info(f"budget exceeded: {exc}")
        return 3
    except CheckFailure as exc:
        _info(f"check failed: {exc}")
        return 1
    except (SpecError, ConfigError, MachineParseError, NormlabError) as exc:
        _info(f"error: {exc}")
        return 2
    except (ValueError, OSError) as exc:
        _info(f"error: {exc}")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
