"""Representation systems and their brute-force naming complexities.

A representation system f maps finite digit words to rationals; the
complexity of a real x at precision n is the length of a shortest word
whose f-value lands strictly within base**-n of x, capped at n+1 when no
word of length <= n does.  The transduced variant feeds machine inputs
through a transducer first and measures input length instead.

Searches enumerate words (or machine inputs) in length order under an
explicit node budget.  Two structural fast paths avoid enumeration
entirely: the identity system reads candidates straight off x's digit
stream, and any affine-over-identity system with a rational target is
searched on the digit lattice of the transformed target.  Both paths are
exact and are property-tested against plain enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantError, MachineParseError
from .numstream import RealSpec, digits, near_tester, spec_to_str
from .transducer import (
    DEFAULT_BUDGET,
    OutputTracker,
    ProfileEntry,
    Transducer,
    identity_transducer,
    run,
    search_min_input,
)


class RepSystem:
    """Base class: a total map from digit words to rational values."""

    base: int

    def eval(self, sigma) -> Fraction:
        num, den = self._eval_pair(tuple(sigma))
        return Fraction(num, den)

    def _eval_pair(self, sigma: tuple) -> tuple[int, int]:
        """(numerator, denominator) with denominator > 0; avoids Fraction."""
        raise NotImplementedError

    def _affine_chain(self) -> tuple[Fraction, Fraction] | None:
        """(Q, R) with f(sigma) = Q * 0.sigma + R when structurally affine."""
        return None

    def describe(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.describe()


class IdentitySystem(RepSystem):
    """f(d1..dm) = 0.d1..dm in the system's base."""

    def __init__(self, base: int):
        if base < 2:
            raise ValueError(f"base must be >= 2, got {base}")
        self.base = base
        self._pows = [1]

    def _pow(self, e: int) -> int:
        pows = self._pows
        while len(pows) <= e:
            pows.append(pows[-1] * self.base)
        return pows[e]

    def _eval_pair(self, sigma):
        num = 0
        for d in sigma:
            num = num * self.base + d
        return num, self._pow(len(sigma))

    def _affine_chain(self):
        return Fraction(1), Fraction(0)

    def describe(self):
        return f"identity(base {self.base})"

    def __eq__(self, other):
        return isinstance(other, IdentitySystem) and other.base == self.base

    def __hash__(self):
        return hash(("identity", self.base))


class AffineSystem(RepSystem):
    """f(sigma) = q * inner(sigma) + r for rationals q != 0, r.

    q may be negative (that is how complement transport is expressed);
    distances then scale by |q|.
    """

    def __init__(self, q, r, inner: RepSystem):
        self.q = Fraction(q)
        self.r = Fraction(r)
        if self.q == 0:
            raise ValueError("affine factor q must be nonzero")
        self.inner = inner
        self.base = inner.base

    def _eval_pair(self, sigma):
        ni, di = self.inner._eval_pair(sigma)
        qn, qd = self.q.numerator, self.q.denominator
        rn, rd = self.r.numerator, self.r.denominator
        return qn * ni * rd + rn * qd * di, qd * di * rd

    def _affine_chain(self):
        chain = self.inner._affine_chain()
        if chain is None:
            return None
        qi, ri = chain
        return self.q * qi, self.q * ri + self.r

    def describe(self):
        return f"affine({self.q}, {self.r}, {self.inner.describe()})"

    def __eq__(self, other):
        return (
            isinstance(other, AffineSystem)
            and (other.q, other.r, other.inner) == (self.q, self.r, self.inner)
        )

    def __hash__(self):
        return hash(("affine", self.q, self.r, self.inner))


class ComposedSystem(RepSystem):
    """f(sigma) = inner(machine(sigma)): words are machine inputs."""

    def __init__(self, inner: RepSystem, machine: Transducer):
        if inner.base != machine.base:
            raise ValueError(
                f"system base {inner.base} != machine base {machine.base}"
            )
        self.inner = inner
        self.machine = machine
        self.base = inner.base

    def _eval_pair(self, sigma):
        return self.inner._eval_pair(tuple(run(self.machine, sigma)))

    def describe(self):
        return f"compose({self.inner.describe()}, {len(self.machine.states)}-state machine)"


class TabularSystem(RepSystem):
    """Finitely many listed words get fixed values, the rest fall back."""

    def __init__(self, overrides: dict, fallback: RepSystem):
        self.fallback = fallback
        self.base = fallback.base
        self.overrides = {}
        for word, value in overrides.items():
            word = tuple(int(d) for d in word)
            for d in word:
                if not 0 <= d < self.base:
                    raise ValueError(f"digit {d} out of range in override {word}")
            self.overrides[word] = Fraction(value)

    def _eval_pair(self, sigma):
        hit = self.overrides.get(sigma)
        if hit is not None:
            return hit.numerator, hit.denominator
        return self.fallback._eval_pair(sigma)

    def describe(self):
        return f"tabular({len(self.overrides)} overrides, {self.fallback.describe()})"


class StagedSystem(RepSystem):
    """Evaluation through a finite chain of upper approximations.

    stage_fn(k, sigma) must be nonincreasing in k; eval returns the last
    stage and audits the whole chain on every call, raising
    InvariantError on the first violation.
    """

    def __init__(self, base: int, stage_fn, stages: int, label: str = "staged"):
        if stages < 1:
            raise ValueError("need at least one stage")
        self.base = base
        self.stage_fn = stage_fn
        self.stages = stages
        self.label = label

    def _eval_pair(self, sigma):
        prev = None
        for k in range(1, self.stages + 1):
            cur = Fraction(self.stage_fn(k, sigma))
            if prev is not None and cur > prev:
                raise InvariantError(
                    f"{self.label}: stage {k} value {cur} exceeds stage {k-1} value {prev}"
                )
            prev = cur
        return prev.numerator, prev.denominator

    def describe(self):
        return f"{self.label}({self.stages} stages, base {self.base})"


def staged_ceil(inner: RepSystem, stages: int) -> StagedSystem:
    """Stage k rounds inner's value up to the nearest base**-k grid point."""
    base = inner.base

    def stage(k, sigma):
        v = inner.eval(sigma)
        scale = base**k
        return Fraction(-((-v.numerator * scale) // v.denominator), scale)

    return StagedSystem(base, stage, stages, label=f"ceil-staged[{inner.describe()}]")


def compose(inner: RepSystem, machine: Transducer) -> ComposedSystem:
    return ComposedSystem(inner, machine)


# ---------------------------------------------------------------------------
# trackers driving the shared input-tree search


class _AffineTracker(OutputTracker):
    """Output lattice point num/base**len pushed through Q * . + R."""

    def __init__(self, base: int, tester, q: Fraction, r: Fraction):
        self.base = base
        self.tester = tester
        self.qn, self.qd = q.numerator, q.denominator
        self.rn, self.rd = r.numerator, r.denominator
        self.nums = [0]
        self.lens = [0]
        self._pows = [1]

    def _pow(self, e):
        pows = self._pows
        while len(pows) <= e:
            pows.append(pows[-1] * self.base)
        return pows[e]

    def push(self, emitted):
        num = self.nums[-1]
        for d in emitted:
            num = num * self.base + d
        self.nums.append(num)
        self.lens.append(self.lens[-1] + len(emitted))

    def pop(self, emitted):
        self.nums.pop()
        self.lens.pop()

    def matches(self):
        bl = self._pow(self.lens[-1])
        num = self.qn * self.nums[-1] * self.rd + self.rn * self.qd * bl
        return self.tester(num, self.qd * self.rd * bl)


class _SystemTracker(OutputTracker):
    """Keeps the output word and asks the system for its value each time."""

    def __init__(self, system: RepSystem, tester):
        self.system = system
        self.tester = tester
        self.word: list[int] = []

    def push(self, emitted):
        self.word.extend(emitted)

    def pop(self, emitted):
        if emitted:
            del self.word[-len(emitted):]

    def matches(self):
        num, den = self.system._eval_pair(tuple(self.word))
        return self.tester(num, den)


# ---------------------------------------------------------------------------
# complexity searches


def _identity_search(spec: RealSpec, base: int, n: int) -> int:
    """Identity fast path: candidates come straight off the digit stream.

    At word length m the two lattice points nearest x are floor(x*b**m)
    and its successor, so only those can beat the tolerance.
    """
    tester = near_tester(spec, base, n)
    if tester(0, 1):
        return 0
    ds = digits(spec, base, n).digits
    j = 0
    power = 1
    for m in range(1, n + 1):
        j = j * base + ds[m - 1]
        power *= base
        if tester(j, power):
            return m
        if j + 1 < power and tester(j + 1, power):
            return m
    return n + 1


def _affine_lattice_search(x: Fraction, q: Fraction, r: Fraction, base: int, n: int) -> int:
    """Affine-over-identity with rational x: search the transformed target.

    |q*0.sigma + r - x| < b**-n  iff  |0.sigma - t| < b**-n/|q| with
    t = (x - r)/q, so at each length only the lattice neighbours of t
    need testing (clipped into the valid digit-word range).
    """
    t = (x - r) / q
    rho = Fraction(1, base**n) / abs(q)
    if abs(Fraction(0) - t) < rho:
        return 0
    power = 1
    for m in range(1, n + 1):
        power *= base
        jf = (t.numerator * power) // t.denominator
        for j in {min(max(jf, 0), power - 1), min(max(jf + 1, 0), power - 1)}:
            if abs(Fraction(j, power) - t) < rho:
                return m
    return n + 1


def name_complexity(
    spec: RealSpec, system: RepSystem, n: int, budget: int = DEFAULT_BUDGET
) -> int:
    """Length of a shortest word within base**-n of the spec, capped at n+1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    base = system.base
    chain = system._affine_chain()
    if chain is not None:
        q, r = chain
        if q == 1 and r == 0:
            return _identity_search(spec, base, n)
        value = spec.exact_value()
        if value is not None:
            return _affine_lattice_search(value, q, r, base, n)
    tester = near_tester(spec, base, n)
    if chain is not None:
        tracker = _AffineTracker(base, tester, *chain)
    else:
        tracker = _SystemTracker(system, tester)
    return search_min_input(identity_transducer(base), n, tracker, budget)


def transduced_complexity(
    spec: RealSpec,
    system: RepSystem,
    machine: Transducer,
    n: int,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Shortest machine-input length whose output the system maps near the spec.

    Output words are not monotone in the input, so no lattice shortcut
    applies; the input tree is enumerated within the budget.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if system.base != machine.base:
        raise ValueError(f"system base {system.base} != machine base {machine.base}")
    tester = near_tester(spec, system.base, n)
    chain = system._affine_chain()
    if chain is not None:
        tracker = _AffineTracker(system.base, tester, *chain)
    else:
        tracker = _SystemTracker(system, tester)
    return search_min_input(machine, n, tracker, budget)


# ---------------------------------------------------------------------------
# profiles


@dataclass
class ComplexitySeries:
    """name_complexity (or one machine's transduced variant) along a grid."""

    label: str
    spec_string: str
    entries: list[ProfileEntry]
    # per eps: grid points where value < (1 - eps) * n, i.e. genuine
    # compression below full length
    compression_points: dict[float, list[int]]

    CSV_HEADER = ("label", "spec", "n", "value", "cap_hit", "ratio_num", "ratio_den")

    def csv_rows(self):
        for e in self.entries:
            yield (
                self.label,
                self.spec_string,
                e.n,
                e.value,
                int(e.cap_hit),
                e.ratio.numerator,
                e.ratio.denominator,
            )

    def to_text(self) -> str:
        lines = [f"{self.label} on {self.spec_string}"]
        for e in self.entries:
            flag = " (cap)" if e.cap_hit else ""
            lines.append(f"  n={e.n} value={e.value}{flag} ratio={float(e.ratio):.4f}")
        for eps, points in self.compression_points.items():
            where = ", ".join(map(str, points)) if points else "none"
            lines.append(f"  compression below (1-{eps:g})*n at n: {where}")
        return "\n".join(lines)


def _series(label, spec_string, values_by_n, eps_values):
    entries = [
        ProfileEntry(n, v, v == n + 1, Fraction(v, n)) for n, v in values_by_n
    ]
    compression = {
        eps: [n for n, v in values_by_n if Fraction(v, 1) < (1 - Fraction(eps).limit_denominator(10**6)) * n]
        for eps in eps_values
    }
    return ComplexitySeries(label, spec_string, entries, compression)


def weak_profile(
    spec: RealSpec,
    system: RepSystem,
    n_values,
    eps_values=(0.05,),
    budget: int = DEFAULT_BUDGET,
) -> ComplexitySeries:
    """name_complexity along a grid, with sub-linear compression flags."""
    grid = sorted(set(int(v) for v in n_values))
    vals = [(n, name_complexity(spec, system, n, budget)) for n in grid]
    return _series(system.describe(), spec_to_str(spec), vals, eps_values)


def strong_profile(
    spec: RealSpec,
    system: RepSystem,
    machines: dict[str, Transducer],
    n_values,
    eps_values=(0.05,),
    budget: int = DEFAULT_BUDGET,
) -> dict[str, ComplexitySeries]:
    """transduced_complexity per machine along a grid."""
    grid = sorted(set(int(v) for v in n_values))
    out = {}
    for name, machine in machines.items():
        vals = [(n, transduced_complexity(spec, system, machine, n, budget)) for n in grid]
        out[name] = _series(
            f"{system.describe()} via {name}", spec_to_str(spec), vals, eps_values
        )
    return out


# ---------------------------------------------------------------------------
# tabular file format
#
# Line 1:   base=<b> [fallback=identity]
# Others:   <word> <value>   with "-" for the empty word; contiguous
#           digits for base <= 10, comma-separated integers above.


def parse_tabular(text: str) -> TabularSystem:
    base = None
    fallback = "identity"
    overrides: dict[tuple, Fraction] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if base is None:
            fields = dict(part.split("=", 1) for part in line.split() if "=" in part)
            if "base" not in fields:
                raise MachineParseError("header needs base=<b>", line_no)
            try:
                base = int(fields["base"])
            except ValueError as exc:
                raise MachineParseError("base must be an integer", line_no) from exc
            fallback = fields.get("fallback", "identity")
            if fallback != "identity":
                raise MachineParseError(f"unknown fallback {fallback!r}", line_no)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MachineParseError("expected '<word> <value>'", line_no)
        word_txt, value_txt = parts
        if word_txt == "-":
            word = ()
        else:
            try:
                if base <= 10:
                    word = tuple(int(c) for c in word_txt)
                else:
                    word = tuple(int(tok) for tok in word_txt.split(","))
            except ValueError as exc:
                raise MachineParseError(f"bad word {word_txt!r}", line_no) from exc
        if word in overrides:
            raise MachineParseError(f"duplicate word {word_txt!r}", line_no)
        try:
            overrides[word] = Fraction(value_txt)
        except (ValueError, ZeroDivisionError) as exc:
            raise MachineParseError(f"bad value {value_txt!r}", line_no) from exc
    if base is None:
        raise MachineParseError("empty tabular file")
    try:
        return TabularSystem(overrides, IdentitySystem(base))
    except ValueError as exc:
        raise MachineParseError(str(exc)) from exc


def load_tabular(path: str) -> TabularSystem:
    with open(path, encoding="ascii") as fh:
        return parse_tabular(fh.read())
