"""Finite-state betting martingales over digit streams.

A machine in state q splits its capital over the next digit according
to a stake vector s(q); reading digit a multiplies capital by
base * s(q)[a] and moves to delta(q, a).  Stake vectors that sum to 1
make the betting fair: the average of d(wa) over a equals d(w) times
the base-sum, so capital is a martingale exactly when every state's
stakes sum to 1.  fairness_check reports states that break this.

Capitals are exact rationals for short prefixes and base-2 logarithms
for long ones; a zero stake bankrupts the capital permanently, which
the log view records as -inf.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import MachineParseError
from .numstream import RealSpec, digits, spec_to_str

_EXACT_LIMIT = 1000


@dataclass
class FSMartingale:
    base: int
    states: list[str]
    start: str
    delta: dict[tuple[str, int], str]
    stakes: dict[str, tuple[Fraction, ...]]
    capital0: Fraction = Fraction(1)
    _tables: tuple | None = field(init=False, compare=False, repr=False, default=None)

    def __post_init__(self):
        self.capital0 = Fraction(self.capital0)
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if not self.states or len(set(self.states)) != len(self.states):
            raise ValueError("states must be nonempty and unique")
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} not declared")
        if self.capital0 <= 0:
            raise ValueError("initial capital must be positive")
        names = set(self.states)
        for q in self.states:
            for a in range(self.base):
                if (q, a) not in self.delta:
                    raise ValueError(f"missing transition for ({q!r}, {a})")
            if q not in self.stakes:
                raise ValueError(f"missing stake vector for {q!r}")
            vec = tuple(Fraction(s) for s in self.stakes[q])
            if len(vec) != self.base:
                raise ValueError(f"stake vector for {q!r} must have {self.base} entries")
            if any(s < 0 for s in vec):
                raise ValueError(f"negative stake in state {q!r}")
            self.stakes[q] = vec
        for (q, a), target in self.delta.items():
            if q not in names or not 0 <= a < self.base or target not in names:
                raise ValueError(f"bad transition ({q!r}, {a}) -> {target!r}")

    def tables(self):
        """(start index, next-state table, stake table, log2 factor table)."""
        if self._tables is None:
            idx = {q: i for i, q in enumerate(self.states)}
            nxt = [[idx[self.delta[(q, a)]] for a in range(self.base)] for q in self.states]
            stk = [self.stakes[q] for q in self.states]
            logf = [
                [
                    math.log2(self.base * s) if s > 0 else None
                    for s in self.stakes[q]
                ]
                for q in self.states
            ]
            self._tables = (idx[self.start], nxt, stk, logf)
        return self._tables


def fairness_check(m: FSMartingale) -> list[str]:
    """Violation messages; empty means every state's stakes sum to 1.

    Also exercises the averaging identity sum_a d(wa) == base * d(w) on
    all prefixes of length <= 2, which must hold exactly when the sums
    do; a nonempty report lists each failure separately.
    """
    problems = []
    for q in m.states:
        total = sum(m.stakes[q], Fraction(0))
        if total != 1:
            problems.append(f"state {q!r}: stakes sum to {total}, not 1")
    if problems:
        return problems
    for length in (0, 1, 2):
        for w in itertools.product(range(m.base), repeat=length):
            d_w = capital_exact(m, w)[-1]
            total = sum(capital_exact(m, list(w) + [a])[-1] for a in range(m.base))
            if total != m.base * d_w:
                problems.append(
                    f"averaging identity fails after prefix {list(w)}"
                )
    return problems


def capital_exact(m: FSMartingale, ds) -> list[Fraction]:
    """Capitals d(w) for every prefix of ds, starting with d(empty)."""
    start, nxt, stk, _ = m.tables()
    state = start
    cap = m.capital0
    out = [cap]
    b = m.base
    for a in ds:
        cap = cap * b * stk[state][a]
        out.append(cap)
        state = nxt[state][a]
    return out


def capital_log2(m: FSMartingale, ds) -> list[float]:
    """log2 of the capitals, -inf once the capital hits zero."""
    start, nxt, _, logf = m.tables()
    state = start
    lg = math.log2(m.capital0)
    out = [lg]
    for a in ds:
        f = logf[state][a]
        lg = -math.inf if f is None else lg + f
        out.append(lg)
        state = nxt[state][a]
    return out


def capital(m: FSMartingale, ds):
    """Exact rational capitals up to 1000 digits, log2 floats beyond."""
    ds = list(ds)
    if len(ds) <= _EXACT_LIMIT:
        return capital_exact(m, ds)
    return capital_log2(m, ds)


# ---------------------------------------------------------------------------
# success profiles


@dataclass
class ThresholdEntry:
    """How often log2-capital cleared one growth line over a stream."""

    threshold: str  # e.g. "0.05*n" or "sqrt(n)"
    crossings: int
    last_cross: int | None
    solid_from: int | None  # smallest n0 with every n >= n0 crossing
    label: str  # sustained | late | intermittent | never


@dataclass
class SuccessProfile:
    spec_string: str
    base: int
    n_max: int
    settle_in: int
    entries: list[ThresholdEntry]
    final_log2: float
    peak_log2: float
    peak_at: int
    samples: list[tuple[int, float]]  # downsampled (n, log2 d(w[:n]))

    def to_text(self) -> str:
        lines = [
            f"success profile on {self.spec_string} (base {self.base}, "
            f"n_max {self.n_max})",
            f"  final log2 capital {self.final_log2:.4f}; "
            f"peak {self.peak_log2:.4f} at n={self.peak_at}",
        ]
        for e in self.entries:
            tail = f"solid from n={e.solid_from}" if e.solid_from else "no solid tail"
            lines.append(
                f"  vs {e.threshold}: {e.label} ({e.crossings} crossings, "
                f"last at {e.last_cross}, {tail})"
            )
        return "\n".join(lines)

    CSV_HEADER = ("spec", "base", "n", "log2_capital")

    def csv_rows(self):
        for n, lg in self.samples:
            yield (self.spec_string, self.base, n, f"{lg:.6f}")


def _classify(hits: list[bool], settle_in: int) -> ThresholdEntry:
    crossings = sum(hits)
    n_max = len(hits)
    last = max((i + 1 for i, h in enumerate(hits) if h), default=None)
    solid_from = None
    if hits and hits[-1]:
        i = n_max
        while i >= 1 and hits[i - 1]:
            i -= 1
        solid_from = i + 1
    if solid_from is not None:
        label = "sustained" if solid_from <= settle_in else "late"
    elif crossings:
        label = "intermittent"
    else:
        label = "never"
    return ThresholdEntry("", crossings, last, solid_from, label)


def success_profile(
    m: FSMartingale,
    spec: RealSpec,
    n_max: int,
    eps_values=(0.05,),
    settle_in: int = 1000,
    sample_count: int = 2048,
) -> SuccessProfile:
    """Descriptive growth report of the martingale along a spec's stream.

    For each eps the capital's log2 is compared with the line eps*n, and
    with sqrt(n) as a slower reference; the labels only describe this
    finite window, they decide nothing about the limit.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ds = digits(spec, m.base, n_max).digits
    lgs = capital_log2(m, ds)
    thresholds = [(f"{eps:g}*n", lambda n, e=eps: e * n) for eps in eps_values]
    thresholds.append(("sqrt(n)", math.sqrt))
    entries = []
    for name, line in thresholds:
        hits = [lgs[n] >= line(n) for n in range(1, n_max + 1)]
        entry = _classify(hits, settle_in)
        entry.threshold = name
        entries.append(entry)
    body = lgs[1:]
    peak = max(body)
    step = max(1, n_max // sample_count)
    samples = [(n, lgs[n]) for n in range(1, n_max + 1, step)]
    if samples[-1][0] != n_max:
        samples.append((n_max, lgs[n_max]))
    return SuccessProfile(
        spec_to_str(spec),
        m.base,
        n_max,
        settle_in,
        entries,
        lgs[n_max],
        peak,
        body.index(peak) + 1,
        samples,
    )


# ---------------------------------------------------------------------------
# machine text format
#
# Line 1:   base=<b> states=<count> start=<name> [capital=<rational>]
# Others:   <state> <digit> -> <state>        (transition)
#           <state> : s0,s1,...,s{b-1}        (stake vector, rationals)


def serialize_martingale(m: FSMartingale) -> str:
    cap = "" if m.capital0 == 1 else f" capital={m.capital0}"
    lines = [f"base={m.base} states={len(m.states)} start={m.start}{cap}"]
    for q in m.states:
        for a in range(m.base):
            lines.append(f"{q} {a} -> {m.delta[(q, a)]}")
        lines.append(f"{q} : " + ",".join(str(s) for s in m.stakes[q]))
    return "\n".join(lines) + "\n"


def parse_martingale(text: str) -> FSMartingale:
    base = declared = start = None
    capital0 = Fraction(1)
    states: list[str] = []
    delta: dict[tuple[str, int], str] = {}
    stakes: dict[str, tuple[Fraction, ...]] = {}

    def note_state(name):
        if name not in states:
            states.append(name)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if base is None:
            fields = dict(part.split("=", 1) for part in line.split() if "=" in part)
            missing = {"base", "states", "start"} - fields.keys()
            if missing:
                raise MachineParseError(f"header lacks {sorted(missing)}", line_no)
            try:
                base = int(fields["base"])
                declared = int(fields["states"])
                if "capital" in fields:
                    capital0 = Fraction(fields["capital"])
            except (ValueError, ZeroDivisionError) as exc:
                raise MachineParseError(f"bad header field: {exc}", line_no) from exc
            start = fields["start"]
            continue
        if ":" in line:
            name, _, rest = line.partition(":")
            name = name.strip()
            if name in stakes:
                raise MachineParseError(f"duplicate stakes for {name!r}", line_no)
            try:
                vec = tuple(Fraction(tok.strip()) for tok in rest.split(","))
            except (ValueError, ZeroDivisionError) as exc:
                raise MachineParseError(f"bad stake vector: {exc}", line_no) from exc
            note_state(name)
            stakes[name] = vec
            continue
        parts = line.split()
        if len(parts) != 4 or parts[2] != "->":
            raise MachineParseError("expected '<state> <digit> -> <state>' or stakes", line_no)
        src, digit_txt, _, dst = parts
        try:
            a = int(digit_txt)
        except ValueError as exc:
            raise MachineParseError(f"bad digit {digit_txt!r}", line_no) from exc
        if not 0 <= a < base:
            raise MachineParseError(f"digit {a} out of range", line_no)
        if (src, a) in delta:
            raise MachineParseError(f"duplicate transition ({src}, {a})", line_no)
        note_state(src)
        delta[(src, a)] = dst
    if base is None:
        raise MachineParseError("empty machine file")
    if len(states) != declared:
        raise MachineParseError(
            f"header declares {declared} states but lines name {len(states)}"
        )
    try:
        return FSMartingale(base, states, start, delta, stakes, capital0)
    except ValueError as exc:
        raise MachineParseError(str(exc)) from exc


def load_martingale(path: str) -> FSMartingale:
    with open(path, encoding="ascii") as fh:
        return parse_martingale(fh.read())


# ---------------------------------------------------------------------------
# stock machines


def periodic_full_stake(base: int, period) -> FSMartingale:
    """Bets everything on the next digit of a fixed periodic pattern.

    On the matching stream the capital multiplies by `base` each step;
    one unexpected digit bankrupts it.
    """
    period = [int(d) for d in period]
    if not period:
        raise ValueError("period must be nonempty")
    for d in period:
        if not 0 <= d < base:
            raise ValueError(f"digit {d} out of range for base {base}")
    k = len(period)
    states = [f"p{i}" for i in range(k)]
    delta = {}
    stakes = {}
    for i in range(k):
        vec = [Fraction(0)] * base
        vec[period[i]] = Fraction(1)
        stakes[states[i]] = tuple(vec)
        for a in range(base):
            delta[(states[i], a)] = states[(i + 1) % k]
    return FSMartingale(base, states, states[0], delta, stakes)


def uniform_martingale(base: int) -> FSMartingale:
    """Stakes 1/base everywhere: capital is constant on every stream."""
    vec = tuple(Fraction(1, base) for _ in range(base))
    delta = {("q", a): "q" for a in range(base)}
    return FSMartingale(base, ["q"], "q", delta, {"q": vec})


def random_martingale(rng, base: int, max_states: int, grain: int = 16) -> FSMartingale:
    """Random fair machine; stakes are multiples of 1/grain summing to 1."""
    count = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(count)]
    delta = {}
    stakes = {}
    for q in states:
        cuts = sorted(rng.randrange(grain + 1) for _ in range(base - 1))
        parts = [a - b for a, b in zip(cuts + [grain], [0] + cuts)]
        stakes[q] = tuple(Fraction(p, grain) for p in parts)
        for a in range(base):
            delta[(q, a)] = states[rng.randrange(count)]
    return FSMartingale(base, states, states[0], delta, stakes)
