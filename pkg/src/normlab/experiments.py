"""Packaged experiment drivers with pass/fail checks.

Each driver runs a self-contained study — separation of plain vs
transduced name complexity, interleave parts of a normal-looking
stream, complexity transport under arithmetic closure maps, or a
randomized equivalence suite — and returns an ExperimentResult whose
checks carry expected/observed pairs.  Drivers are deterministic given
their parameters (and seed, where one applies).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .blockstats import count_blocks, discrepancy
from .numstream import (
    Complement,
    Interleave,
    Rational,
    Scale,
    digits,
    interleave_split,
    parse_spec,
    spec_to_str,
)
from .repsys import (
    AffineSystem,
    IdentitySystem,
    compose,
    name_complexity,
    transduced_complexity,
)
from .transducer import doubling_transducer, random_transducer


@dataclass
class Check:
    name: str
    expected: str
    observed: str
    passed: bool


@dataclass
class ExperimentResult:
    name: str
    params: dict
    checks: list[Check] = field(default_factory=list)
    seed: int | None = None

    CSV_HEADER = ("experiment", "check", "expected", "observed", "passed")

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    def csv_rows(self):
        for c in self.checks:
            yield (self.name, c.name, c.expected, c.observed, int(c.passed))

    def to_text(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        if self.seed is not None:
            params += f", seed={self.seed}"
        lines = [f"experiment {self.name} ({params})"]
        for c in self.checks:
            mark = "ok " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}: expected {c.expected}, got {c.observed}")
        lines.append(f"  verdict: {'PASS' if self.verdict else 'FAIL'}")
        return "\n".join(lines)

    def _check(self, name, expected, observed, passed=None):
        if passed is None:
            passed = expected == observed
        self.checks.append(Check(name, str(expected), str(observed), passed))


def run_separation_example(base: int = 3, n_max: int = 12) -> ExperimentResult:
    """Identity names of (base-2)/(base-1) are full length, doubled names half.

    The value's expansion is the constant digit base-2, which the
    doubling machine emits two at a time, so feeding it ceil(n/2)
    digits reproduces the prefix while no shorter plain name exists.
    """
    if base < 3:
        raise ValueError("the separation example needs base >= 3")
    if n_max < 1:
        raise ValueError("n_max must be positive")
    result = ExperimentResult(
        "separation", {"base": base, "n_max": n_max, "x": f"{base - 2}/{base - 1}"}
    )
    x = Rational(base - 2, base - 1)
    ident = IdentitySystem(base)
    machine = doubling_transducer(base)
    for n in range(1, n_max + 1):
        plain = name_complexity(x, ident, n)
        result._check(f"plain name length at n={n}", n, plain)
        doubled = transduced_complexity(x, ident, machine, n)
        result._check(f"doubled name length at n={n}", math.ceil(n / 2), doubled)
    return result


def run_interleave_experiment(
    n: int = 10_000, z_threshold: float = 0.02, part_floor: float = 0.2
) -> ExperimentResult:
    """Interleave parts of a block-balanced stream are badly unbalanced.

    Splits the base-2 digit-concatenation stream into its even and odd
    parts (digits kept in place, the other parity zeroed), then checks
    that the parent's block discrepancy stays under z_threshold for
    blocks of length 1 and 2 while each part's single-digit discrepancy
    exceeds part_floor, and that the parts recombine to the parent.
    """
    if n < 10_000:
        raise ValueError("interleave statistics need n >= 10000")
    z = parse_spec("champernowne:2")
    even, odd = interleave_split(z)
    result = ExperimentResult(
        "interleave", {"n": n, "z_threshold": z_threshold, "part_floor": part_floor}
    )
    zw = digits(z, 2, n)
    z_disc = max(float(discrepancy(count_blocks(zw, k))) for k in (1, 2))
    result._check(
        "parent max block discrepancy (k<=2)",
        f"< {z_threshold:g}",
        f"{z_disc:.4f}",
        z_disc < z_threshold,
    )
    ew, ow = digits(even, 2, n), digits(odd, 2, n)
    for label, part in (("even", ew), ("odd", ow)):
        d = float(discrepancy(count_blocks(part, 1)))
        result._check(
            f"{label} part single-digit discrepancy",
            f">= {part_floor:g}",
            f"{d:.4f}",
            d >= part_floor,
        )
    mism = sum(1 for a, b, c in zip(ew.digits, ow.digits, zw.digits) if a + b != c)
    result._check("positions where parts fail to recombine", 0, mism)
    return result


def run_closure_experiments(n_max: int = 10, shift_n_max: int = 14) -> ExperimentResult:
    """Name complexity transported through complement and digit shift.

    Complementing every digit is the affine map x -> 1 - x - (b^-n
    tail), realized here by comparing identity-system names of x with
    affine(-1, 1) names of its complement stream.  Dividing by the base
    prepends a zero digit, so names of the scaled stream under
    affine(1/b, 0) match names of the original one position earlier.
    """
    if n_max < 1 or shift_n_max < 2:
        raise ValueError("need n_max >= 1 and shift_n_max >= 2")
    result = ExperimentResult(
        "closure", {"n_max": n_max, "shift_n_max": shift_n_max}
    )
    x = Rational(1, 3)
    comp = Complement(x)
    ident10 = IdentitySystem(10)
    flip = AffineSystem(Fraction(-1), Fraction(1), ident10)
    for n in range(1, n_max + 1):
        lhs = name_complexity(comp, flip, n)
        rhs = name_complexity(x, ident10, n)
        result._check(f"complement transport at n={n}", rhs, lhs)
    z = parse_spec("champernowne:2")
    shifted = Scale(Fraction(1, 2), z)
    ident2 = IdentitySystem(2)
    halve = AffineSystem(Fraction(1, 2), Fraction(0), ident2)
    for n in range(2, shift_n_max + 1):
        lhs = name_complexity(shifted, halve, n)
        rhs = name_complexity(z, ident2, n - 1)
        result._check(f"digit-shift transport at n={n}", rhs, lhs)
    return result


def run_compose_identity_suite(trials: int = 40, seed: int = 0) -> ExperimentResult:
    """transduced_complexity(x, f, D, n) == name_complexity(x, compose(f, D), n).

    Random rational targets, random machines, identity or affine inner
    systems; every trial must agree exactly.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = random.Random(seed)
    result = ExperimentResult("compose-identity", {"trials": trials}, seed=seed)
    failures = []
    for t in range(trials):
        base = rng.choice((2, 3))
        machine = random_transducer(rng, base, max_states=4)
        ident = IdentitySystem(base)
        if rng.random() < 0.5:
            f = ident
        else:
            q = Fraction(rng.choice((1, 1, 2, -1)), rng.choice((1, 2)))
            r = Fraction(rng.randint(-1, 1), rng.choice((1, 2, 3)))
            f = AffineSystem(q, r, ident)
        den = rng.randint(1, 50)
        x = Rational(rng.randrange(den), den)
        n = rng.randint(1, 8)
        via_machine = transduced_complexity(x, f, machine, n)
        via_composed = name_complexity(x, compose(f, machine), n)
        if via_machine != via_composed:
            failures.append(
                f"trial {t}: base={base} x={spec_to_str(x)} n={n} "
                f"f={f.describe()}: {via_machine} != {via_composed}"
            )
    result._check(
        f"agreeing trials out of {trials}",
        trials,
        trials - len(failures),
    )
    for msg in failures:
        result._check("disagreement", "", msg, False)
    return result


def run_all(seed: int = 0) -> list[ExperimentResult]:
    return [
        run_separation_example(),
        run_interleave_experiment(),
        run_closure_experiments(),
        run_compose_identity_suite(seed=seed),
    ]
