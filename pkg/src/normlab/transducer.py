"""Finite-state transducers over digit alphabets and their output complexities.

A machine reads base-b input digits and, on each step, first emits a
(possibly empty) run of base-b output digits and then moves to the next
state.  Two complexity questions are answered here:

* min_input_length: the length of a shortest input whose output equals a
  target block exactly, or NOT_AN_OUTPUT when no input produces it.
* approx_input_complexity: the length of a shortest input whose output,
  read as 0.d1d2.., lands strictly within base**-n of a spec's value;
  inputs of length up to n are tried and n+1 is returned when none hits.

The exact variant is a breadth-first search over (state, matched-prefix)
pairs, so it never enumerates inputs.  The approximate variant must
enumerate (nearness is not prefix-monotone), which is why it carries an
explicit node budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from collections import deque

from .errors import BudgetExceededError, MachineParseError
from .numstream import RealSpec, near_tester

NOT_AN_OUTPUT = math.inf

DEFAULT_BUDGET = 4_000_000


@dataclass
class Transducer:
    """Deterministic transducer: total transition and output tables.

    delta maps (state, digit) to the next state; out maps the same keys
    to the digit run emitted before the move.  Both tables must cover
    every state/digit pair.
    """

    base: int
    states: list[str]
    start: str
    delta: dict[tuple[str, int], str]
    out: dict[tuple[str, int], tuple[int, ...]]
    _tables: tuple | None = field(init=False, compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if not self.states:
            raise ValueError("machine needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if self.start not in self.states:
            raise ValueError(f"start state {self.start!r} not declared")
        names = set(self.states)
        for q in self.states:
            for a in range(self.base):
                if (q, a) not in self.delta:
                    raise ValueError(f"missing transition for ({q!r}, {a})")
                if (q, a) not in self.out:
                    raise ValueError(f"missing output for ({q!r}, {a})")
        for (q, a), target in self.delta.items():
            if q not in names or not 0 <= a < self.base:
                raise ValueError(f"transition key ({q!r}, {a}) out of range")
            if target not in names:
                raise ValueError(f"transition target {target!r} not declared")
        for (q, a), word in self.out.items():
            self.out[(q, a)] = tuple(word)
            for d in self.out[(q, a)]:
                if not 0 <= d < self.base:
                    raise ValueError(f"output digit {d} out of range on ({q!r}, {a})")

    def tables(self):
        """Index-compiled (start, next, out) tables for tight loops."""
        if self._tables is None:
            idx = {q: i for i, q in enumerate(self.states)}
            nxt = [[idx[self.delta[(q, a)]] for a in range(self.base)] for q in self.states]
            out = [[self.out[(q, a)] for a in range(self.base)] for q in self.states]
            self._tables = (idx[self.start], nxt, out)
        return self._tables


def run(machine: Transducer, input_digits) -> list[int]:
    """Output digits produced by the machine on the given input."""
    start, nxt, out = machine.tables()
    state = start
    result: list[int] = []
    for a in input_digits:
        if not 0 <= a < machine.base:
            raise ValueError(f"input digit {a} out of range for base {machine.base}")
        result.extend(out[state][a])
        state = nxt[state][a]
    return result


def min_input_length(machine: Transducer, target) -> int | float:
    """Length of a shortest input with output exactly `target`, else NOT_AN_OUTPUT.

    Breadth-first search over (state, digits-of-target-already-emitted);
    the state space is |Q| * (len(target)+1) regardless of how many
    inputs exist.
    """
    sigma = tuple(target)
    for d in sigma:
        if not 0 <= d < machine.base:
            raise ValueError(f"target digit {d} out of range for base {machine.base}")
    length = len(sigma)
    if length == 0:
        return 0
    start, nxt, out = machine.tables()
    base = machine.base
    seen = {(start, 0)}
    queue = deque([(start, 0, 0)])
    while queue:
        state, matched, depth = queue.popleft()
        for a in range(base):
            o = out[state][a]
            end = matched + len(o)
            if end > length or sigma[matched:end] != o:
                continue
            if end == length:
                return depth + 1
            key = (nxt[state][a], end)
            if key not in seen:
                seen.add(key)
                queue.append((nxt[state][a], end, depth + 1))
    return NOT_AN_OUTPUT


class OutputTracker:
    """Incremental view of the output word during an input-tree walk.

    search_min_input drives one of these along a depth-first walk of all
    inputs: push when a digit is consumed, pop on backtrack, matches()
    to ask whether the current output is accepted.
    """

    def push(self, emitted: tuple[int, ...]) -> None:
        raise NotImplementedError

    def pop(self, emitted: tuple[int, ...]) -> None:
        raise NotImplementedError

    def matches(self) -> bool:
        raise NotImplementedError


class _LatticeTracker(OutputTracker):
    """Tracks the output as an exact lattice point num / base**len."""

    def __init__(self, base: int, tester):
        self.base = base
        self.tester = tester
        self.nums = [0]
        self.lens = [0]
        self._pows = [1]

    def _pow(self, e: int) -> int:
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
        return self.tester(self.nums[-1], self._pow(self.lens[-1]))


def search_min_input(
    machine: Transducer, n: int, tracker: OutputTracker, budget: int = DEFAULT_BUDGET
) -> int:
    """Shortest input length in 0..n whose output the tracker accepts, else n+1.

    Walks the full input tree depth-first (branches are cut once they
    cannot beat the best hit), so the worst case visits every input of
    length <= n.  That count is checked against `budget` up front.
    """
    base = machine.base
    nodes = (base ** (n + 1) - 1) // (base - 1)
    if nodes > budget:
        raise BudgetExceededError(
            f"input enumeration would visit {nodes} nodes, budget is {budget}"
        )
    if tracker.matches():
        return 0
    start, nxt, out = machine.tables()
    best = n + 1

    def walk(state: int, depth: int):
        nonlocal best
        for a in range(base):
            o = out[state][a]
            tracker.push(o)
            if tracker.matches():
                best = min(best, depth + 1)
            elif depth + 2 < best and depth + 1 < n:
                walk(nxt[state][a], depth + 1)
            tracker.pop(o)
            if best == depth + 1:
                break  # nothing shorter exists in this subtree
    if n >= 1 and best > 1:
        walk(start, 0)
    return best


def approx_input_complexity(
    machine: Transducer, spec: RealSpec, n: int, budget: int = DEFAULT_BUDGET
) -> int:
    """Shortest input length whose output lands within base**-n of the spec.

    Outputs are read as 0.d1d2..; the distance test is exact.  Returns
    n+1 when no input of length up to n comes close enough.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tester = near_tester(spec, machine.base, n)
    return search_min_input(machine, n, _LatticeTracker(machine.base, tester), budget)


@dataclass
class ProfileEntry:
    """One row of a complexity-versus-length profile."""

    n: int
    value: int
    cap_hit: bool
    ratio: Fraction


def input_complexity_profile(
    machine: Transducer, spec: RealSpec, n_values, budget: int = DEFAULT_BUDGET
) -> list[ProfileEntry]:
    entries = []
    for n in sorted(set(int(v) for v in n_values)):
        value = approx_input_complexity(machine, spec, n, budget)
        entries.append(ProfileEntry(n, value, value == n + 1, Fraction(value, n)))
    return entries


# ---------------------------------------------------------------------------
# machine text format
#
# Line 1:   base=<b> states=<count> start=<name>
# Others:   <state> <digit> -> <state> / <output>
# where <output> is contiguous digits for base <= 10, comma-separated
# integers for larger bases, or "-" for the empty word.  Blank lines and
# lines starting with "#" are skipped.


def _format_word(word: tuple[int, ...], base: int) -> str:
    if not word:
        return "-"
    if base <= 10:
        return "".join(str(d) for d in word)
    return ",".join(str(d) for d in word)


def _parse_word(text: str, base: int, line_no: int) -> tuple[int, ...]:
    if text == "-":
        return ()
    try:
        if base <= 10:
            word = tuple(int(c) for c in text)
        else:
            word = tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise MachineParseError(f"bad output word {text!r}", line_no) from exc
    for d in word:
        if not 0 <= d < base:
            raise MachineParseError(f"output digit {d} out of range", line_no)
    return word


def serialize_transducer(machine: Transducer) -> str:
    lines = [f"base={machine.base} states={len(machine.states)} start={machine.start}"]
    for q in machine.states:
        for a in range(machine.base):
            word = _format_word(machine.out[(q, a)], machine.base)
            lines.append(f"{q} {a} -> {machine.delta[(q, a)]} / {word}")
    return "\n".join(lines) + "\n"


def parse_transducer(text: str) -> Transducer:
    base = declared = start = None
    states: list[str] = []
    delta: dict[tuple[str, int], str] = {}
    out: dict[tuple[str, int], tuple[int, ...]] = {}
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
            except ValueError as exc:
                raise MachineParseError("base and states must be integers", line_no) from exc
            start = fields["start"]
            continue
        parts = line.split()
        if len(parts) != 6 or parts[2] != "->" or parts[4] != "/":
            raise MachineParseError(
                "expected '<state> <digit> -> <state> / <output>'", line_no
            )
        src, digit_txt, _, dst, _, word_txt = parts
        try:
            a = int(digit_txt)
        except ValueError as exc:
            raise MachineParseError(f"bad input digit {digit_txt!r}", line_no) from exc
        if not 0 <= a < base:
            raise MachineParseError(f"input digit {a} out of range", line_no)
        if (src, a) in delta:
            raise MachineParseError(f"duplicate transition ({src}, {a})", line_no)
        if src not in states:
            states.append(src)  # totality puts every state here eventually
        delta[(src, a)] = dst
        out[(src, a)] = _parse_word(word_txt, base, line_no)
    if base is None:
        raise MachineParseError("empty machine file")
    if len(states) != declared:
        raise MachineParseError(
            f"header declares {declared} states but transitions name {len(states)}"
        )
    try:
        return Transducer(base, states, start, delta, out)
    except ValueError as exc:
        raise MachineParseError(str(exc)) from exc


def load_transducer(path: str) -> Transducer:
    with open(path, encoding="ascii") as fh:
        return parse_transducer(fh.read())


# ---------------------------------------------------------------------------
# stock machines


def identity_transducer(base: int) -> Transducer:
    """Copies its input unchanged."""
    delta = {("q", a): "q" for a in range(base)}
    out = {("q", a): (a,) for a in range(base)}
    return Transducer(base, ["q"], "q", delta, out)


def doubling_transducer(base: int) -> Transducer:
    """Copies every digit except base-2, which it emits twice.

    On the constant stream of base-2 digits this halves the input
    length needed to cover an n-digit target, which is what separates
    the approximate input complexity from the identity machine's.
    """
    d = base - 2
    delta = {("q", a): "q" for a in range(base)}
    out = {("q", a): (a,) for a in range(base)}
    out[("q", d)] = (d, d)
    return Transducer(base, ["q"], "q", delta, out)


def random_transducer(rng, base: int, max_states: int, max_out_len: int = 2) -> Transducer:
    """Uniformly random total machine; deterministic given the rng state."""
    count = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(count)]
    delta = {}
    out = {}
    for q in states:
        for a in range(base):
            delta[(q, a)] = states[rng.randrange(count)]
            out[(q, a)] = tuple(
                rng.randrange(base) for _ in range(rng.randint(0, max_out_len))
            )
    return Transducer(base, states, states[0], delta, out)
