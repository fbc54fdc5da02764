"""Plain-text experiment configuration.

The format is line-oriented and diff-friendly: four sections, one
declaration per line, `#` comments.

    [specs]
    z = champernowne:2
    [machines]
    dbl = transducer machines/doubling.txt
    f   = repsys affine:1/2:0
    [jobs]
    blocks --spec z --base 2 --k 2 --n 1000,10000
    repsys cfn --spec z --base 2 --f f --n 8
    [output]
    dir = out
    seed = 7

Job lines are command lines of this package's CLI with `--spec`, `--f`,
`--machine`, and `--codecs` values either declared names from the
sections above or inline literals.  Every name a job references must be
declared; violations are reported with their line number.

Representation systems are written in a colon grammar (`identity`,
`affine:Q:R[:inner]`, `tabular:PATH`, `composed:PATH[:inner]`,
`staged:K[:inner]`), codecs as `passthrough`, `runlength`, `lz`, or
`repsys:SYSTEM`.  Paths are resolved relative to the config file.
"""

from __future__ import annotations

import os
import shlex
from dataclasses import dataclass, field
from fractions import Fraction

from .dimension import (
    Codec,
    LZCodec,
    PassthroughCodec,
    RepSysCodec,
    RunLengthCodec,
)
from .errors import ConfigError, MachineParseError, SpecError
from .numstream import RealSpec, parse_spec, spec_to_str
from .repsys import (
    AffineSystem,
    IdentitySystem,
    RepSystem,
    compose,
    load_tabular,
    staged_ceil,
)
from .transducer import load_transducer
from .martingale import load_martingale

SUBCOMMANDS = (
    "digits",
    "blocks",
    "transducer",
    "martingale",
    "repsys",
    "dim",
    "experiment",
    "cache",
)

_FSPEC_HEADS = ("identity", "affine", "tabular", "composed", "staged")
_CODEC_NAMES = ("passthrough", "runlength", "lz")
MACHINE_KINDS = ("transducer", "martingale", "repsys", "codec")


def parse_fspec(text: str, base: int, root: str = ".") -> RepSystem:
    """Representation system from the colon grammar, in the given base."""
    head, _, rest = text.partition(":")
    if head == "identity":
        if rest:
            raise ValueError("identity takes no parameters")
        return IdentitySystem(base)
    if head == "affine":
        parts = rest.split(":", 2)
        if len(parts) < 2:
            raise ValueError("affine needs Q:R")
        q, r = Fraction(parts[0]), Fraction(parts[1])
        inner = parse_fspec(parts[2], base, root) if len(parts) == 3 else IdentitySystem(base)
        return AffineSystem(q, r, inner)
    if head == "tabular":
        if not rest:
            raise ValueError("tabular needs a file path")
        return load_tabular(os.path.join(root, rest))
    if head == "composed":
        path, _, inner_text = rest.partition(":")
        if not path:
            raise ValueError("composed needs a transducer file path")
        inner = parse_fspec(inner_text, base, root) if inner_text else IdentitySystem(base)
        return compose(inner, load_transducer(os.path.join(root, path)))
    if head == "staged":
        stages_text, _, inner_text = rest.partition(":")
        if not stages_text:
            raise ValueError("staged needs a stage count")
        inner = parse_fspec(inner_text, base, root) if inner_text else IdentitySystem(base)
        return staged_ceil(inner, int(stages_text))
    raise ValueError(f"unknown representation system {text!r}")


def parse_codec(text: str, base: int, root: str = ".") -> Codec:
    if text == "passthrough":
        return PassthroughCodec()
    if text == "runlength":
        return RunLengthCodec()
    if text == "lz":
        return LZCodec()
    head, _, rest = text.partition(":")
    if head == "repsys":
        return RepSysCodec(parse_fspec(rest or "identity", base, root))
    raise ValueError(f"unknown codec {text!r}")


def _looks_like_fspec(text: str) -> bool:
    return text.partition(":")[0] in _FSPEC_HEADS


def _looks_like_codec(text: str) -> bool:
    return text in _CODEC_NAMES or text.partition(":")[0] == "repsys"


@dataclass
class MachineDecl:
    kind: str  # one of MACHINE_KINDS
    source: str  # file path (resolved) or inline grammar string
    line_no: int


@dataclass
class Job:
    line_no: int
    argv: list[str]


@dataclass
class ExperimentConfig:
    specs: dict[str, RealSpec] = field(default_factory=dict)
    machines: dict[str, MachineDecl] = field(default_factory=dict)
    jobs: list[Job] = field(default_factory=list)
    outdir: str | None = None
    seed: int = 0
    root: str = "."


def _parse_decl(line: str, line_no: int) -> tuple[str, str]:
    name, eq, value = (part.strip() for part in line.partition("="))
    if not eq or not name or not value:
        raise ConfigError("expected `name = value`", line_no)
    if not name.replace("_", "").replace("-", "").isalnum():
        raise ConfigError(f"bad name {name!r}", line_no)
    return name, value


def _load_machine(kind: str, rest: str, root: str, line_no: int) -> MachineDecl:
    if kind in ("transducer", "martingale"):
        path = os.path.join(root, rest)
        try:
            (load_transducer if kind == "transducer" else load_martingale)(path)
        except FileNotFoundError:
            raise ConfigError(f"machine file not found: {rest}", line_no)
        except MachineParseError as exc:
            raise ConfigError(f"bad {kind} file {rest}: {exc}", line_no)
        return MachineDecl(kind, path, line_no)
    if kind == "repsys":
        if not _looks_like_fspec(rest):
            raise ConfigError(f"bad representation system {rest!r}", line_no)
        return MachineDecl(kind, rest, line_no)
    if kind == "codec":
        if not _looks_like_codec(rest):
            raise ConfigError(f"bad codec {rest!r}", line_no)
        return MachineDecl(kind, rest, line_no)
    raise ConfigError(
        f"machine kind must be one of {', '.join(MACHINE_KINDS)}", line_no
    )


_JOB_NAME_FLAGS = {
    "--spec": "spec",
    "--f": "repsys",
    "--machine": "machine-file",
    "--codecs": "codec",
}


def _validate_job(cfg: ExperimentConfig, job: Job) -> None:
    argv = job.argv
    if not argv or argv[0] not in SUBCOMMANDS:
        raise ConfigError(
            f"job must start with one of {', '.join(SUBCOMMANDS)}", job.line_no
        )
    if argv[0] == "experiment" and "batch" in argv[:2]:
        raise ConfigError("batch jobs cannot nest", job.line_no)
    for flag, value in zip(argv, argv[1:]):
        role = _JOB_NAME_FLAGS.get(flag)
        if role is None:
            continue
        for item in value.split(","):
            _validate_name(cfg, role, item, job.line_no)


def _validate_name(cfg: ExperimentConfig, role: str, value: str, line_no: int) -> None:
    if role == "spec":
        if value in cfg.specs:
            return
        try:
            parse_spec(value)
        except SpecError:
            raise ConfigError(f"undeclared spec {value!r}", line_no)
    elif role == "repsys":
        decl = cfg.machines.get(value)
        if decl is not None:
            if decl.kind != "repsys":
                raise ConfigError(
                    f"{value!r} is a {decl.kind}, not a representation system", line_no
                )
            return
        if not _looks_like_fspec(value):
            raise ConfigError(f"undeclared representation system {value!r}", line_no)
    elif role == "machine-file":
        name = value.split("=", 1)[-1]  # strong profiles use label=machine
        decl = cfg.machines.get(name)
        if decl is not None:
            if decl.kind not in ("transducer", "martingale"):
                raise ConfigError(f"{name!r} is a {decl.kind}, not a machine", line_no)
            return
        if not os.path.exists(os.path.join(cfg.root, name)):
            raise ConfigError(f"undeclared machine {name!r}", line_no)
    elif role == "codec":
        decl = cfg.machines.get(value)
        if decl is not None:
            if decl.kind != "codec":
                raise ConfigError(f"{value!r} is a {decl.kind}, not a codec", line_no)
            return
        if not _looks_like_codec(value):
            raise ConfigError(f"undeclared codec {value!r}", line_no)


def resolve_job_argv(cfg: ExperimentConfig, job: Job) -> list[str]:
    """Job argv with declared names replaced by their literal values."""
    out = [job.argv[0]]
    pending_flag = None
    for tok in job.argv[1:]:
        if pending_flag is not None:
            role = _JOB_NAME_FLAGS[pending_flag]
            parts = []
            for item in tok.split(","):
                if role == "spec" and item in cfg.specs:
                    parts.append(spec_to_str(cfg.specs[item]))
                elif role == "machine-file":
                    label, eq, name = item.rpartition("=")
                    decl = cfg.machines.get(name)
                    parts.append(f"{label}{eq}{decl.source}" if decl else item)
                elif item in cfg.machines:
                    parts.append(cfg.machines[item].source)
                else:
                    parts.append(item)
            out.append(",".join(parts))
            pending_flag = None
        else:
            out.append(tok)
            if tok in _JOB_NAME_FLAGS:
                pending_flag = tok
    return out


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a config file; errors carry line numbers."""
    cfg = ExperimentConfig(root=os.path.dirname(os.path.abspath(path)))
    section = None
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line not in ("[specs]", "[machines]", "[jobs]", "[output]"):
                raise ConfigError(f"unknown section {line}", line_no)
            section = line[1:-1]
            continue
        if section is None:
            raise ConfigError("content before any section header", line_no)
        if section == "specs":
            name, value = _parse_decl(line, line_no)
            if name in cfg.specs:
                raise ConfigError(f"duplicate spec {name!r}", line_no)
            try:
                cfg.specs[name] = parse_spec(value)
            except SpecError as exc:
                raise ConfigError(f"bad spec {value!r}: {exc}", line_no)
        elif section == "machines":
            name, value = _parse_decl(line, line_no)
            if name in cfg.machines:
                raise ConfigError(f"duplicate machine {name!r}", line_no)
            kind, _, rest = value.partition(" ")
            cfg.machines[name] = _load_machine(kind, rest.strip(), cfg.root, line_no)
        elif section == "jobs":
            cfg.jobs.append(Job(line_no, shlex.split(line)))
        else:  # output
            name, value = _parse_decl(line, line_no)
            if name == "dir":
                cfg.outdir = os.path.join(cfg.root, value)
            elif name == "seed":
                try:
                    cfg.seed = int(value)
                except ValueError:
                    raise ConfigError(f"seed must be an integer, got {value!r}", line_no)
            else:
                raise ConfigError(f"unknown output key {name!r}", line_no)
    for job in cfg.jobs:
        _validate_job(cfg, job)
    return cfg
