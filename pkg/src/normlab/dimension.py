"""Codec-based finite-state dimension estimates.

Each codec maps a digit word to a '0'/'1' program and back; the cost of
a word is k_m = min(len(program), len(word)), charged after verifying
decode(encode(w)) == w (a codec that cannot reproduce the word raises
CodecInvalidError rather than report a bogus cost).  Dimension is
estimated as the liminf-style minimum of min-over-codecs cost ratios on
the trailing quarter of the length grid; on a finite grid that is only
an estimate, never a certificate.

Stock codecs: bit-packing passthrough, run-length with gamma-coded run
lengths, a greedy self-referential LZ with gamma-coded back-references,
and a representation-system codec whose programs name the word through
a shorter word of the system plus a truncate/successor/predecessor
selector on the value's digit lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, CodecInvalidError
from .numstream import RealSpec, digits, digits_to_int, int_to_digits, spec_to_str
from .repsys import IdentitySystem, RepSystem

# ---------------------------------------------------------------------------
# Elias gamma


def gamma_encode(k: int) -> str:
    """Elias gamma code of k >= 1: floor(log2 k) zeros then k in binary."""
    if k < 1:
        raise ValueError("gamma codes cover integers >= 1")
    body = bin(k)[2:]
    return "0" * (len(body) - 1) + body


def gamma_decode(bits: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while pos + zeros < len(bits) and bits[pos + zeros] == "0":
        zeros += 1
    end = pos + zeros + zeros + 1
    if end > len(bits):
        raise CodecInvalidError("truncated gamma code")
    return int(bits[pos + zeros : end], 2), end


def _digit_width(base: int) -> int:
    return (base - 1).bit_length()


def _pack_word(word, base: int) -> str:
    w = _digit_width(base)
    return "".join(format(d, f"0{w}b") for d in word)


def _unpack_word(bits: str, base: int) -> list[int]:
    w = _digit_width(base)
    if len(bits) % w:
        raise CodecInvalidError("packed word length not a multiple of digit width")
    out = []
    for i in range(0, len(bits), w):
        d = int(bits[i : i + w], 2) if w else 0
        if d >= base:
            raise CodecInvalidError(f"packed digit {d} out of range for base {base}")
        out.append(d)
    return out


# ---------------------------------------------------------------------------
# codecs


class Codec:
    name: str

    def encode(self, word, base: int) -> str:
        raise NotImplementedError

    def decode(self, program: str, base: int) -> list[int]:
        raise NotImplementedError


class PassthroughCodec(Codec):
    """Fixed-width bit packing; the do-nothing baseline."""

    name = "passthrough"

    def encode(self, word, base):
        return _pack_word(word, base)

    def decode(self, program, base):
        return _unpack_word(program, base)


class RunLengthCodec(Codec):
    """digit (fixed width) + gamma(run length), repeated."""

    name = "runlength"

    def encode(self, word, base):
        w = _digit_width(base)
        out = []
        i = 0
        word = list(word)
        while i < len(word):
            j = i
            while j < len(word) and word[j] == word[i]:
                j += 1
            out.append(format(word[i], f"0{w}b"))
            out.append(gamma_encode(j - i))
            i = j
        return "".join(out)

    def decode(self, program, base):
        w = _digit_width(base)
        out: list[int] = []
        pos = 0
        while pos < len(program):
            if pos + w > len(program):
                raise CodecInvalidError("truncated run digit")
            d = int(program[pos : pos + w], 2)
            if d >= base:
                raise CodecInvalidError(f"run digit {d} out of range")
            pos += w
            count, pos = gamma_decode(program, pos)
            out.extend([d] * count)
        return out


class LZCodec(Codec):
    """Greedy LZ with gamma-coded self-referential back-references.

    Tokens: '0' + packed digit (literal) or '1' + gamma(offset) +
    gamma(length) (copy `length` digits from `offset` back, overlap
    allowed).  Matches come from hash chains over 4-digit grams and are
    emitted only when they cost fewer bits than the literals they
    replace.
    """

    name = "lz"
    _GRAM = 4
    _CHAIN = 32

    def encode(self, word, base):
        w = _digit_width(base)
        word = list(word)
        n = len(word)
        grams: dict[tuple, list[int]] = {}
        out = []
        i = 0
        while i < n:
            best_len = 0
            best_off = 0
            if i + self._GRAM <= n:
                key = tuple(word[i : i + self._GRAM])
                for j in reversed(grams.get(key, ())):
                    length = self._GRAM
                    while i + length < n and word[j + length] == word[i + length]:
                        length += 1
                    if length > best_len:
                        best_len = length
                        best_off = i - j
            emitted_match = False
            if best_len:
                cost = 1 + len(gamma_encode(best_off)) + len(gamma_encode(best_len))
                if cost < best_len * (1 + w):
                    out.append("1")
                    out.append(gamma_encode(best_off))
                    out.append(gamma_encode(best_len))
                    emitted_match = True
            step = best_len if emitted_match else 1
            if not emitted_match:
                out.append("0")
                out.append(format(word[i], f"0{w}b"))
            for p in range(i, min(i + step, n - self._GRAM + 1)):
                key = tuple(word[p : p + self._GRAM])
                chain = grams.setdefault(key, [])
                chain.append(p)
                if len(chain) > 2 * self._CHAIN:
                    del chain[: -self._CHAIN]
            i += step
        return "".join(out)

    def decode(self, program, base):
        w = _digit_width(base)
        out: list[int] = []
        pos = 0
        while pos < len(program):
            flag = program[pos]
            pos += 1
            if flag == "0":
                if pos + w > len(program):
                    raise CodecInvalidError("truncated literal")
                d = int(program[pos : pos + w], 2)
                if d >= base:
                    raise CodecInvalidError(f"literal digit {d} out of range")
                out.append(d)
                pos += w
            else:
                off, pos = gamma_decode(program, pos)
                length, pos = gamma_decode(program, pos)
                if off < 1 or off > len(out):
                    raise CodecInvalidError(f"back-reference {off} out of range")
                start = len(out) - off
                for t in range(length):
                    out.append(out[start + t])
        return out


class RepSysCodec(Codec):
    """Programs name the word through a shorter word of a representation system.

    A hit program is '0' + gamma(n) + packed sigma + 2-bit selector; the
    decoder computes F = floor(f(sigma) * base**n) and reconstructs the
    word as the n-digit expansion of F, F+1, or F-1 according to the
    selector.  Words the system cannot shorten are stored verbatim
    behind a '1' escape.  For the identity system the shortest usable
    sigma falls out of base-adic valuations with no search at all.
    """

    _SELECTORS = {0: "00", 1: "01", -1: "10"}
    _SELECTOR_VALUE = {"00": 0, "01": 1, "10": -1}

    def __init__(self, system: RepSystem, search_budget: int = 65536):
        self.system = system
        self.search_budget = search_budget
        self.name = f"repsys[{system.describe()}]"

    def encode(self, word, base):
        if base != self.system.base:
            raise ValueError(f"codec system works in base {self.system.base}, not {base}")
        word = list(word)
        n = len(word)
        escape = "1" + _pack_word(word, base)
        if n == 0:
            return escape
        target = digits_to_int(word, base)
        hit = self._find_hit(target, base, n)
        if hit is None:
            return escape
        sigma, selector = hit
        program = (
            "0"
            + gamma_encode(n)
            + _pack_word(sigma, base)
            + self._SELECTORS[selector]
        )
        return program if len(program) < len(escape) else escape

    def _find_hit(self, target: int, base: int, n: int):
        """Shortest sigma with floor(f(sigma)*b**n) within 1 of the target."""
        chain = self.system._affine_chain()
        if chain is not None and chain == (1, 0):
            bn = base**n
            best = None
            for t in (target - 1, target, target + 1):
                if not 0 <= t < bn:
                    continue
                if t == 0:
                    m = 0
                else:
                    m = n
                    tt = t
                    while tt % base == 0:
                        tt //= base
                        m -= 1
                if best is None or m < best[0]:
                    best = (m, t)
            if best is None:
                return None
            m, t = best
            sigma = int_to_digits(t // base ** (n - m), base, m)
            return sigma, target - t
        # generic system: length-ordered enumeration under the budget
        from itertools import product

        nodes = 0
        bn = base**n
        for m in range(n):
            nodes += base**m
            if nodes > self.search_budget:
                return None
            for sigma in product(range(base), repeat=m):
                num, den = self.system._eval_pair(sigma)
                f_floor = (num * bn) // den
                if abs(target - f_floor) <= 1:
                    return list(sigma), target - f_floor
        return None

    def decode(self, program, base):
        if not program:
            raise CodecInvalidError("empty program")
        if program[0] == "1":
            return _unpack_word(program[1:], base)
        n, pos = gamma_decode(program, 1)
        if len(program) - pos < 2:
            raise CodecInvalidError("program lacks selector")
        selector = program[-2:]
        if selector not in self._SELECTOR_VALUE:
            raise CodecInvalidError(f"bad selector {selector!r}")
        sigma = _unpack_word(program[pos:-2], base)
        num, den = self.system._eval_pair(tuple(sigma))
        bn = base**n
        value = (num * bn) // den + self._SELECTOR_VALUE[selector]
        if not 0 <= value < bn:
            raise CodecInvalidError("reconstructed value escapes the digit range")
        return int_to_digits(value, base, n)


def default_codecs(base: int) -> list[Codec]:
    return [
        PassthroughCodec(),
        RunLengthCodec(),
        LZCodec(),
        RepSysCodec(IdentitySystem(base)),
    ]


# ---------------------------------------------------------------------------
# costs and profiles


def codec_cost(codec: Codec, word, base: int) -> int:
    """k_m = min(program bits, word length), after a round-trip check."""
    word = list(word)
    program = codec.encode(word, base)
    back = codec.decode(program, base)
    if back != word:
        raise CodecInvalidError(
            f"codec {codec.name} failed round-trip on a {len(word)}-digit word"
        )
    return min(len(program), len(word))


@dataclass
class DimProfile:
    """Per-length codec costs for one stream and the trailing-window estimate."""

    spec_string: str
    base: int
    n_grid: list[int]
    codec_names: list[str]
    rows: list[tuple[int, dict[str, int]]]  # (n, {codec: k_m})

    CSV_HEADER = ("spec", "base", "n", "codec", "k_m", "ratio")

    def min_ratio(self, n: int) -> Fraction:
        for row_n, costs in self.rows:
            if row_n == n:
                return Fraction(min(costs.values()), n)
        raise KeyError(n)

    @property
    def estimate(self) -> Fraction:
        """Minimum of min-ratios over the trailing quarter of the grid."""
        tail = self.rows[-max(1, len(self.rows) // 4) :]
        return min(Fraction(min(costs.values()), n) for n, costs in tail)

    def csv_rows(self):
        for n, costs in self.rows:
            for name in self.codec_names:
                k = costs[name]
                yield (self.spec_string, self.base, n, name, k, f"{k / n:.6f}")

    def to_text(self) -> str:
        lines = [f"dimension profile for {self.spec_string} (base {self.base})"]
        for n, costs in self.rows:
            parts = ", ".join(f"{name}={costs[name]}" for name in self.codec_names)
            lines.append(f"  n={n}: {parts}; min ratio {float(self.min_ratio(n)):.4f}")
        lines.append(f"  trailing-window estimate {float(self.estimate):.4f}")
        return "\n".join(lines)


def dim_profile(
    spec: RealSpec, base: int, n_grid, codecs: list[Codec] | None = None
) -> DimProfile:
    """Codec costs of the spec's prefixes at each grid length."""
    grid = sorted(set(int(n) for n in n_grid))
    if not grid or grid[0] < 1:
        raise ValueError("grid lengths must be positive")
    if codecs is None:
        codecs = default_codecs(base)
    names = [c.name for c in codecs]
    if len(set(names)) != len(names):
        raise ValueError("codec names must be unique")
    word = digits(spec, base, grid[-1]).digits
    rows = []
    for n in grid:
        prefix = word[:n]
        rows.append((n, {c.name: codec_cost(c, prefix, base) for c in codecs}))
    return DimProfile(spec_to_str(spec), base, grid, names, rows)
