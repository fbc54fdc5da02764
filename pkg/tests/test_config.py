import os
from fractions import Fraction

import pytest

from normlab.config import (
    ExperimentConfig,
    load_config,
    parse_codec,
    parse_fspec,
    resolve_job_argv,
)
from normlab.dimension import LZCodec, PassthroughCodec, RepSysCodec, RunLengthCodec
from normlab.errors import ConfigError
from normlab.repsys import AffineSystem, ComposedSystem, IdentitySystem, StagedSystem
from normlab.transducer import doubling_transducer, serialize_transducer


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _machine_file(tmp_path):
    return _write(
        tmp_path, "dbl.txt", serialize_transducer(doubling_transducer(3)) + "\n"
    )


def test_minimal_config_parses(tmp_path):
    path = _write(
        tmp_path,
        "min.cfg",
        "[specs]\nx = rat:1/3\n[jobs]\nblocks --spec x --base 10 --k 1 --n 100\n",
    )
    cfg = load_config(path)
    assert list(cfg.specs) == ["x"]
    assert cfg.jobs[0].argv[0] == "blocks"
    assert cfg.seed == 0 and cfg.outdir is None


def test_undeclared_machine_error_names_the_line(tmp_path):
    path = _write(
        tmp_path,
        "bad.cfg",
        "[specs]\nx = rat:1/3\n\n[jobs]\n"
        "repsys cfnd --spec x --base 3 --f identity --machine ghost --n 4\n",
    )
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert exc.value.line_no == 5
    assert "ghost" in str(exc.value)


def test_undeclared_spec_error(tmp_path):
    path = _write(tmp_path, "bad.cfg", "[jobs]\nblocks --spec nope --base 2 --k 1 --n 10\n")
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert exc.value.line_no == 2


def test_unknown_section_and_stray_content(tmp_path):
    with pytest.raises(ConfigError) as exc:
        load_config(_write(tmp_path, "a.cfg", "[wat]\n"))
    assert exc.value.line_no == 1
    with pytest.raises(ConfigError) as exc:
        load_config(_write(tmp_path, "b.cfg", "x = rat:1/2\n"))
    assert exc.value.line_no == 1


def test_duplicate_and_malformed_declarations(tmp_path):
    with pytest.raises(ConfigError) as exc:
        load_config(_write(tmp_path, "a.cfg", "[specs]\nx = rat:1/2\nx = rat:1/3\n"))
    assert exc.value.line_no == 3
    with pytest.raises(ConfigError) as exc:
        load_config(_write(tmp_path, "b.cfg", "[specs]\nx rat:1/2\n"))
    assert exc.value.line_no == 2
    with pytest.raises(ConfigError) as exc:
        load_config(_write(tmp_path, "c.cfg", "[specs]\nx = rat:9/2\n"))
    assert exc.value.line_no == 2


def test_machine_paths_resolve_relative_to_config(tmp_path):
    _machine_file(tmp_path)
    path = _write(
        tmp_path,
        "cfg.cfg",
        "[machines]\ndbl = transducer dbl.txt\n[jobs]\n"
        "repsys cfnd --spec rat:1/2 --base 3 --f identity --machine dbl --n 4\n",
    )
    cfg = load_config(path)
    assert cfg.machines["dbl"].kind == "transducer"
    assert os.path.isabs(cfg.machines["dbl"].source) or os.path.exists(
        cfg.machines["dbl"].source
    )


def test_missing_machine_file_reported(tmp_path):
    path = _write(tmp_path, "cfg.cfg", "[machines]\nm = transducer nowhere.txt\n")
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert exc.value.line_no == 2


def test_bad_machine_kind(tmp_path):
    path = _write(tmp_path, "cfg.cfg", "[machines]\nm = gadget foo\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_kind_mismatch_in_job(tmp_path):
    _machine_file(tmp_path)
    path = _write(
        tmp_path,
        "cfg.cfg",
        "[machines]\ndbl = transducer dbl.txt\n[jobs]\n"
        "repsys cfn --spec rat:1/2 --base 3 --f dbl --n 4\n",
    )
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert "not a representation system" in str(exc.value)


def test_output_section(tmp_path):
    path = _write(tmp_path, "cfg.cfg", "[output]\ndir = out\nseed = 9\n")
    cfg = load_config(path)
    assert cfg.outdir == str(tmp_path / "out")
    assert cfg.seed == 9
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "bad.cfg", "[output]\ncolor = blue\n"))
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, "bad2.cfg", "[output]\nseed = soon\n"))


def test_nested_batch_rejected(tmp_path):
    path = _write(tmp_path, "cfg.cfg", "[jobs]\nexperiment batch --config other.cfg\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_resolve_job_argv_substitutes_names(tmp_path):
    machine = _machine_file(tmp_path)
    path = _write(
        tmp_path,
        "cfg.cfg",
        "[specs]\nx = rat:1/2\n[machines]\ndbl = transducer dbl.txt\nh = repsys affine:1/2:0\n"
        "[jobs]\nrepsys cfnd --spec x --base 3 --f h --machine dbl --n 4\n",
    )
    cfg = load_config(path)
    argv = resolve_job_argv(cfg, cfg.jobs[0])
    assert "rat:1/2" in argv
    assert "affine:1/2:0" in argv
    assert machine in argv


def test_comments_and_blanks_ignored(tmp_path):
    path = _write(
        tmp_path,
        "cfg.cfg",
        "# header comment\n\n[specs]\nx = rat:1/3  # trailing\n",
    )
    assert list(load_config(path).specs) == ["x"]


# ---------------------------------------------------------------------------
# declaration grammars


def test_parse_fspec_identity_and_affine():
    assert isinstance(parse_fspec("identity", 3), IdentitySystem)
    f = parse_fspec("affine:-1/2:3/4", 10)
    assert isinstance(f, AffineSystem)
    assert (f.q, f.r) == (Fraction(-1, 2), Fraction(3, 4))
    nested = parse_fspec("affine:2:0:affine:1/2:0", 10)
    assert isinstance(nested, AffineSystem)
    assert isinstance(nested.inner, AffineSystem)


def test_parse_fspec_staged_and_composed(tmp_path):
    staged = parse_fspec("staged:3", 2)
    assert isinstance(staged, StagedSystem)
    machine = _machine_file(tmp_path)
    composed = parse_fspec(f"composed:{os.path.basename(machine)}", 3, root=str(tmp_path))
    assert isinstance(composed, ComposedSystem)


def test_parse_fspec_rejects_unknown():
    with pytest.raises(ValueError):
        parse_fspec("parabola:1", 2)
    with pytest.raises(ValueError):
        parse_fspec("affine:1", 2)
    with pytest.raises(ValueError):
        parse_fspec("identity:2", 2)


def test_parse_codec_names():
    assert isinstance(parse_codec("passthrough", 2), PassthroughCodec)
    assert isinstance(parse_codec("runlength", 2), RunLengthCodec)
    assert isinstance(parse_codec("lz", 2), LZCodec)
    rc = parse_codec("repsys:affine:1/2:0", 2)
    assert isinstance(rc, RepSysCodec)
    with pytest.raises(ValueError):
        parse_codec("zip", 2)
