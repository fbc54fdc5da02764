"""Exact digit streams for a small catalog of computable reals in [0, 1).

Every spec denotes a single real number.  Digit extraction is exact: the
first n base-b digits returned are always the canonical expansion, so
``|0.d1..dn - x| < b**-n`` holds with strict inequality.  Reals with two
expansions (the b-adic rationals) use the terminating form, i.e. trailing
zeros rather than a tail of b-1 digits.

Derived specs (complement, scale, cross-base requests) are resolved
through exact rational arithmetic or through refinable enclosures
``x in [lo, hi]``.  When an enclosure cannot separate a decision boundary
within the refinement cap (4x the requested precision plus 64 guard
digits) a TieUnresolvableError is raised; no digit is ever guessed.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    InsufficientPrecisionError,
    SpecError,
    TieUnresolvableError,
)

__all__ = [
    "RealSpec",
    "Rational",
    "Champernowne",
    "SquareRoot",
    "DigitFile",
    "Pseudorandom",
    "Interleave",
    "Complement",
    "Scale",
    "DigitPrefix",
    "digits",
    "within",
    "interleave_split",
    "complement",
    "scale",
    "near_tester",
    "parse_spec",
    "spec_to_str",
    "prefix_value",
    "digits_to_int",
    "int_to_digits",
    "read_digit_cache",
    "write_digit_cache",
    "append_digit_cache",
]

# Guard digits added beyond a request before declaring a tie unresolvable.
_CAP_FACTOR = 4
_CAP_GUARD = 64


def _refinement_cap(base: int, n: int) -> Fraction:
    """Smallest enclosure width we are willing to chase for an n-digit request."""
    return Fraction(1, base ** (_CAP_FACTOR * n + _CAP_GUARD))


# ---------------------------------------------------------------------------
# digit prefix container and integer helpers


@dataclass
class DigitPrefix:
    """A finite run of base-b digits, most significant first.

    offset 0 means the run starts at the most significant fractional digit.
    """

    base: int
    digits: list[int]
    offset: int = 0

    def __post_init__(self):
        if self.base < 2:
            raise SpecError(f"base must be >= 2, got {self.base}")
        if self.offset < 0:
            raise SpecError("offset must be nonnegative")
        for d in self.digits:
            if not 0 <= d < self.base:
                raise SpecError(f"digit {d} out of range for base {self.base}")

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]


def digits_to_int(ds, base: int) -> int:
    """Value of a digit run read as a base-b integer (Horner)."""
    acc = 0
    for d in ds:
        acc = acc * base + d
    return acc


def int_to_digits(value: int, base: int, width: int) -> list[int]:
    """width base-b digits of value, most significant first.

    Splits recursively so megadigit conversions stay subquadratic; plain
    divmod is used below 64 digits.
    """
    if value < 0 or value >= base ** width:
        raise ValueError("value does not fit in the requested width")
    if width <= 64:
        out = []
        for _ in range(width):
            value, d = divmod(value, base)
            out.append(d)
        out.reverse()
        return out
    half = width // 2
    hi, lo = divmod(value, base ** half)
    return int_to_digits(hi, base, width - half) + int_to_digits(lo, base, half)


def prefix_value(prefix) -> Fraction:
    """0.d1d2...dn as an exact rational.

    Accepts a DigitPrefix or a plain digit sequence plus base via the
    DigitPrefix form only; sequences should be wrapped first.
    """
    if isinstance(prefix, DigitPrefix):
        ds, b = prefix.digits, prefix.base
    else:
        raise TypeError("prefix_value expects a DigitPrefix")
    if not ds:
        return Fraction(0)
    return Fraction(digits_to_int(ds, b), b ** len(ds))


# ---------------------------------------------------------------------------
# splitmix64-style counter generator (pseudorandom digit streams)

_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_M1 = 0xBF58476D1CE4B9B9
_SM_M2 = 0x94D049BB133111EB
_U64 = (1 << 64) - 1


def _splitmix_word(seed: int, index: int) -> int:
    """64-bit mix of (seed, index); index is the 1-based digit position."""
    z = (seed + index * _SM_GAMMA) & _U64
    z = ((z ^ (z >> 30)) * _SM_M1) & _U64
    z = ((z ^ (z >> 27)) * _SM_M2) & _U64
    return z ^ (z >> 31)


def _splitmix_digits(seed: int, start: int, count: int, base: int) -> list[int]:
    """Digits at positions start..start+count-1 (1-based), bulk path."""
    if count <= 0:
        return []
    if count < 1024:
        return [_splitmix_word(seed, i) % base for i in range(start, start + count)]
    import numpy as np

    idx = np.arange(start, start + count, dtype=np.uint64)
    z = np.uint64(seed) + idx * np.uint64(_SM_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_SM_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_SM_M2)
    z = z ^ (z >> np.uint64(31))
    return (z % np.uint64(base)).astype(np.int64).tolist()


# ---------------------------------------------------------------------------
# spec variants


class RealSpec:
    """Base class for number specs.  Instances are immutable values."""

    def exact_value(self) -> Fraction | None:
        """The denoted real as a Fraction when it is known rational, else None."""
        return None

    def _native_digits(self, base: int, n: int) -> list[int] | None:
        """First n digits in the given base when directly generable, else None."""
        return None

    def _enclosure(self, max_width: Fraction) -> tuple[Fraction, Fraction]:
        """[lo, hi] containing x with hi - lo <= max_width."""
        raise NotImplementedError

    def __str__(self):
        return spec_to_str(self)


def _prefix_enclosure(spec: RealSpec, base: int, max_width: Fraction):
    """Enclosure built from the spec's own digit stream in `base`."""
    k, scale_ = 1, base
    while Fraction(1, scale_) > max_width:
        k += 1
        scale_ *= base
    ds = spec._native_digits(base, k)
    lo = Fraction(digits_to_int(ds, base), scale_)
    return lo, lo + Fraction(1, scale_)


@dataclass(unsafe_hash=True)
class Rational(RealSpec):
    """num/den in [0, 1), digits by long division."""

    num: int
    den: int

    def __post_init__(self):
        if self.den <= 0:
            raise SpecError("denominator must be positive")
        if not 0 <= self.num < self.den:
            raise SpecError("rational spec must lie in [0, 1)")
        g = math.gcd(self.num, self.den)
        self.num //= g
        self.den //= g

    def exact_value(self):
        return Fraction(self.num, self.den)

    def _native_digits(self, base, n):
        return _rational_digits(self.num, self.den, base, n)

    def _enclosure(self, max_width):
        v = self.exact_value()
        return v, v


def _rational_digits(num: int, den: int, base: int, n: int) -> list[int]:
    """Long-division digits, chunked so megadigit prefixes stay cheap."""
    out: list[int] = []
    r = num
    chunk = 64
    big = base ** chunk
    while len(out) < n:
        if r == 0:
            out.extend([0] * (n - len(out)))
            break
        take = min(chunk, n - len(out))
        if take == chunk:
            q, r = divmod(r * big, den)
            out.extend(int_to_digits(q, base, chunk))
        else:
            q, r = divmod(r * base ** take, den)
            out.extend(int_to_digits(q, base, take))
    return out[:n]


@dataclass(unsafe_hash=True)
class Champernowne(RealSpec):
    """0.(1)(2)(3)... with the positive integers written in the given base."""

    base: int
    _cache: list = field(default_factory=list, init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.base < 2:
            raise SpecError("champernowne base must be >= 2")

    def digit_at(self, pos: int) -> int:
        """Digit at 1-based position pos, by positional indexing."""
        if pos < 1:
            raise SpecError("position must be >= 1")
        b = self.base
        length, start = 1, 1
        block = (b - 1) * 1
        while pos > block * length:
            pos -= block * length
            start *= b
            block = start * (b - 1)
            length += 1
        idx, off = divmod(pos - 1, length)
        number = start + idx
        return (number // b ** (length - 1 - off)) % b

    def _native_digits(self, base, n):
        if base != self.base:
            return None
        cache = self._cache
        if len(cache) < n:
            b = self.base
            # resume after the last complete numeral in the cache
            total, i = _champ_resume(b, len(cache))
            del cache[total:]
            while len(cache) < n:
                cache.extend(_numeral(i, b))
                i += 1
        return cache[:n]

    def _enclosure(self, max_width):
        return _prefix_enclosure(self, self.base, max_width)


def _numeral(i: int, base: int) -> list[int]:
    if base == 10:
        return [ord(c) - 48 for c in str(i)]
    ds = []
    while i:
        i, d = divmod(i, base)
        ds.append(d)
    ds.reverse()
    return ds


def _champ_resume(base: int, cached: int):
    """(digits covered by complete numerals <= cached, next numeral)."""
    total, i, length, start = 0, 1, 1, 1
    while True:
        block_digits = start * (base - 1) * length
        if total + block_digits > cached:
            # partial block: step numeral by numeral
            count = (cached - total) // length
            return total + count * length, start + count
        total += block_digits
        start *= base
        length += 1


@dataclass(unsafe_hash=True)
class SquareRoot(RealSpec):
    """Fractional part of sqrt(radicand) for a non-square positive integer.

    Digits come from the digit-by-digit integer recurrence: with A the
    integer built from the digits emitted so far and R = radicand*b**(2k) - A*A,
    the next digit is the largest d with d*(2*A*b + d) <= R*b*b.  Large
    forward jumps are taken with math.isqrt and re-enter the recurrence.
    """

    radicand: int
    _state: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.radicand < 1:
            raise SpecError("radicand must be a positive integer")
        r = math.isqrt(self.radicand)
        if r * r == self.radicand:
            raise SpecError(f"{self.radicand} is a perfect square")

    def _native_digits(self, base, n):
        ds, a, r = self._state.get(base) or ([], math.isqrt(self.radicand), None)
        if r is None:
            r = self.radicand - a * a
        if len(ds) < n:
            if n - len(ds) > 256:
                # batch jump: recompute floor(sqrt(m) * base**n) in one shot
                big = self.radicand * base ** (2 * n)
                a2 = math.isqrt(big)
                frac_digits = int_to_digits(a2 % base ** n, base, n)
                assert frac_digits[: len(ds)] == ds
                ds, a, r = frac_digits, a2, big - a2 * a2
            else:
                bb = base * base
                while len(ds) < n:
                    r *= bb
                    # largest d < base with d*(2*a*base + d) <= r
                    twoab = 2 * a * base
                    d = min(base - 1, r // twoab if twoab else base - 1)
                    while d * (twoab + d) > r:
                        d -= 1
                    r -= d * (twoab + d)
                    a = a * base + d
                    ds.append(d)
            self._state[base] = (ds, a, r)
        return ds[:n]

    def _enclosure(self, max_width):
        return _prefix_enclosure(self, 2, max_width)


@dataclass(unsafe_hash=True)
class Pseudorandom(RealSpec):
    """Digit stream from a fixed 64-bit mixing generator (splitmix64 finalizer).

    Digit i (1-based) is mix(seed + i*0x9E3779B97F4A7C15) mod base.  The
    modulo reduction carries a bias below base * 2**-64, irrelevant at any
    length this package handles.
    """

    seed: int
    base: int
    _cache: list = field(default_factory=list, init=False, compare=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.seed <= _U64:
            raise SpecError("seed must be a 64-bit unsigned integer")
        if self.base < 2:
            raise SpecError("base must be >= 2")

    def _native_digits(self, base, n):
        if base != self.base:
            return None
        cache = self._cache
        if len(cache) < n:
            cache.extend(
                _splitmix_digits(self.seed, len(cache) + 1, n - len(cache), base)
            )
        return cache[:n]

    def _enclosure(self, max_width):
        return _prefix_enclosure(self, self.base, max_width)


@dataclass(unsafe_hash=True)
class DigitFile(RealSpec):
    """Digits served from a cache file; precision is capped by the file."""

    path: str
    base: int
    _loaded: list = field(default_factory=list, init=False, compare=False, repr=False)

    def _load(self) -> list[int]:
        if not self._loaded:
            file_base, _, ds = read_digit_cache(self.path)
            if file_base != self.base:
                raise SpecError(
                    f"digit file {self.path} is base {file_base}, spec says {self.base}"
                )
            self._loaded.append(ds)
        return self._loaded[0]

    def _native_digits(self, base, n):
        if base != self.base:
            return None
        ds = self._load()
        if len(ds) < n:
            raise InsufficientPrecisionError(
                f"{self.path} holds {len(ds)} digits, {n} requested"
            )
        return ds[:n]

    def _enclosure(self, max_width):
        ds = self._load()
        k, scale_ = 1, self.base
        while Fraction(1, scale_) > max_width:
            k += 1
            scale_ *= self.base
        if k > len(ds):
            raise InsufficientPrecisionError(
                f"{self.path} holds {len(ds)} digits, enclosure needs {k}"
            )
        lo = Fraction(digits_to_int(ds[:k], self.base), scale_)
        return lo, lo + Fraction(1, scale_)


@dataclass(unsafe_hash=True)
class Interleave(RealSpec):
    """Bits of the parent kept at one index parity, zeros elsewhere (base 2).

    Positions are 1-based: parity "even" keeps positions 2, 4, 6, ... and
    "odd" keeps 1, 3, 5, ...  The two parts of a split therefore sum back
    to the parent positionwise.
    """

    parent: RealSpec
    parity: str

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise SpecError("parity must be 'even' or 'odd'")

    def _keeps(self, pos: int) -> bool:
        return pos % 2 == (0 if self.parity == "even" else 1)

    def exact_value(self):
        pv = self.parent.exact_value()
        if pv is None:
            return None
        return _interleave_rational_value(pv, self.parity)

    def _native_digits(self, base, n):
        if base != 2:
            return None
        parent_bits = digits(self.parent, 2, n).digits
        return [parent_bits[i] if self._keeps(i + 1) else 0 for i in range(n)]

    def _enclosure(self, max_width):
        v = self.exact_value()
        if v is not None:
            return v, v
        return _prefix_enclosure(self, 2, max_width)


def _interleave_rational_value(pv: Fraction, parity: str) -> Fraction:
    """Exact value of the kept-parity part of a rational's binary stream.

    Long division over base 2 visits finitely many (remainder, parity)
    states; the kept bits are therefore eventually periodic and the value
    is the preperiodic sum plus a geometric series.
    """
    num, den = pv.numerator, pv.denominator
    keep_rem = 0 if parity == "even" else 1
    seen: dict[tuple[int, int], int] = {}
    bits: list[int] = []
    r = num
    pos = 0
    while True:
        state = (r, pos % 2)
        if state in seen:
            break
        seen[state] = pos
        r *= 2
        d, r = divmod(r, den)
        pos += 1
        bits.append(d if pos % 2 == keep_rem else 0)
    start = seen[state]  # preperiod length
    period = pos - start
    pre = sum(Fraction(b, 2 ** (i + 1)) for i, b in enumerate(bits[:start]))
    cyc = sum(Fraction(b, 2 ** (j + 1)) for j, b in enumerate(bits[start:]))
    return pre + Fraction(1, 2 ** start) * cyc / (1 - Fraction(1, 2 ** period))


@dataclass(unsafe_hash=True)
class Complement(RealSpec):
    """1 - x for an inner spec with x in (0, 1)."""

    inner: RealSpec

    def __post_init__(self):
        iv = self.inner.exact_value()
        if iv is not None and not 0 < iv < 1:
            raise SpecError("complement requires the inner real in (0, 1)")

    def exact_value(self):
        iv = self.inner.exact_value()
        return None if iv is None else 1 - iv

    def _native_digits(self, base, n):
        # digitwise flip is the canonical expansion of 1 - x as long as the
        # inner expansion does not terminate at or after position n; verify
        # by looking ahead for a nonzero digit before trusting the flip.
        look = 16
        cap = _CAP_FACTOR * n + _CAP_GUARD
        while True:
            try:
                ds = digits(self.inner, base, n + look).digits
            except (TieUnresolvableError, InsufficientPrecisionError):
                return None
            if any(ds[n:]):
                return [base - 1 - d for d in ds[:n]]
            if n + look >= cap + n:
                raise TieUnresolvableError(
                    "inner stream looks terminating; complement digits unsettled"
                )
            look *= 4

    def _enclosure(self, max_width):
        lo, hi = self.inner._enclosure(max_width)
        return 1 - hi, 1 - lo


@dataclass(unsafe_hash=True)
class Scale(RealSpec):
    """frac(q * x) for a positive rational q."""

    q: Fraction
    inner: RealSpec

    def __post_init__(self):
        self.q = Fraction(self.q)
        if self.q <= 0:
            raise SpecError("scale factor must be a positive rational")

    def exact_value(self):
        iv = self.inner.exact_value()
        if iv is None:
            return None
        v = self.q * iv
        return v - math.floor(v)

    def _shift_exponent(self, base: int) -> int | None:
        """j such that q == base**j (j may be negative), else None."""
        q = self.q
        if q == 1:
            return 0
        for sign, val in ((1, q), (-1, 1 / q)):
            if val.denominator == 1:
                m, j = val.numerator, 0
                while m % base == 0:
                    m //= base
                    j += 1
                if m == 1:
                    return sign * j
        return None

    def _native_digits(self, base, n):
        j = self._shift_exponent(base)
        if j is None:
            return None
        if j == 0:
            return digits(self.inner, base, n).digits
        if j > 0:
            return digits(self.inner, base, n + j).digits[j:]
        j = -j
        if j >= n:
            return [0] * n
        return [0] * j + digits(self.inner, base, n - j).digits

    def _enclosure(self, max_width):
        v = self.exact_value()
        if v is not None:
            return v, v
        q = self.q
        w = max_width / q / 4
        cap = max_width ** 2 * Fraction(1, 1 << (_CAP_GUARD * 4))
        while True:
            lo, hi = self.inner._enclosure(w)
            qlo, qhi = q * lo, q * hi
            flo, fhi = math.floor(qlo), math.floor(qhi)
            if flo == fhi:
                return qlo - flo, qhi - flo
            if w < cap:
                raise TieUnresolvableError(
                    "scaled value sits on an integer boundary beyond the cap"
                )
            w /= 256


# ---------------------------------------------------------------------------
# public operations


def digits(spec: RealSpec, base: int, n: int) -> DigitPrefix:
    """First n canonical base-b digits of the real denoted by spec."""
    if base < 2:
        raise SpecError(f"base must be >= 2, got {base}")
    if n < 0:
        raise SpecError("digit count must be nonnegative")
    if n == 0:
        return DigitPrefix(base, [])
    v = spec.exact_value()
    if v is not None:
        return DigitPrefix(base, _rational_digits(v.numerator, v.denominator, base, n))
    native = spec._native_digits(base, n)
    if native is not None:
        return DigitPrefix(base, list(native))
    if isinstance(spec, DigitFile):
        raise SpecError(
            f"digit file is base {spec.base}; conversion to base {base} is not supported"
        )
    return DigitPrefix(base, _digits_via_enclosure(spec, base, n))


def _digits_via_enclosure(spec: RealSpec, base: int, n: int) -> list[int]:
    """Extract digits by refining an enclosure until floor(x * b**n) settles."""
    scale_ = base ** n
    width = Fraction(1, scale_ * base ** 8)
    cap = _refinement_cap(base, n)
    while True:
        lo, hi = spec._enclosure(width)
        wlo = lo.numerator * scale_ // lo.denominator
        whi = hi.numerator * scale_ // hi.denominator
        if wlo == whi:
            return int_to_digits(wlo, base, n)
        if width < cap:
            raise TieUnresolvableError(
                f"digit {n} of {spec_to_str(spec)} in base {base} sits on a boundary "
                "not separable within the refinement cap"
            )
        width /= base ** 8


def within(spec: RealSpec, r, delta) -> bool:
    """Decide |r - x| < delta exactly (strict inequality).

    r and delta are rationals.  For specs with a known rational value this
    is a single exact comparison; otherwise the spec's enclosure is
    refined until it lands strictly inside or strictly outside the open
    interval (r - delta, r + delta).  A boundary tie that survives the
    refinement cap raises TieUnresolvableError.
    """
    r = Fraction(r)
    delta = Fraction(delta)
    if delta <= 0:
        return False
    v = spec.exact_value()
    if v is not None:
        return abs(r - v) < delta
    lo_bound, hi_bound = r - delta, r + delta
    width = delta / 256
    cap = delta ** 2 * Fraction(1, 1 << (_CAP_GUARD * 2))
    while True:
        lo, hi = spec._enclosure(width)
        if lo > lo_bound and hi < hi_bound:
            return True
        if hi <= lo_bound or lo >= hi_bound:
            return False
        if width < cap:
            raise TieUnresolvableError(
                f"|r - x| vs delta tie for {spec_to_str(spec)} not separable "
                "within the refinement cap"
            )
        width /= 256


def interleave_split(parent: RealSpec) -> tuple[Interleave, Interleave]:
    """Split a real into its even-position and odd-position bit parts.

    Returns (even_part, odd_part) by 1-based bit position; each part keeps
    the parent's bits at one parity and has zeros elsewhere, so the two
    digit streams sum positionwise back to the parent's stream.
    """
    digits(parent, 2, 1)  # parent must support base-2 digits
    return Interleave(parent, "even"), Interleave(parent, "odd")


def complement(inner: RealSpec) -> Complement:
    """Spec denoting 1 - x."""
    return Complement(inner)


def scale(q, inner: RealSpec) -> Scale:
    """Spec denoting frac(q * x) for rational q > 0."""
    return Scale(Fraction(q), inner)


# ---------------------------------------------------------------------------
# near-testers: the exact distance predicate used by complexity searches


class _RationalNear:
    """Tests |num/den - x| < base**-n for rational x, integers only."""

    def __init__(self, value: Fraction, base: int, n: int):
        self.px = value.numerator
        self.qx = value.denominator
        self.bn = base ** n

    def __call__(self, num: int, den: int) -> bool:
        # |num/den - px/qx| < 1/b**n, den > 0
        return abs(num * self.qx - self.px * den) * self.bn < self.qx * den


class _EnclosureNear:
    """Near-test against an irrational (or unknown) x via its enclosure."""

    def __init__(self, spec: RealSpec, base: int, n: int):
        self.spec = spec
        self.base = base
        self.delta = Fraction(1, base ** n)
        self.cap = _refinement_cap(base, n)
        self.width = self.delta / base ** 8
        self.lo, self.hi = spec._enclosure(self.width)

    def _refine(self):
        if self.width < self.cap:
            raise TieUnresolvableError(
                f"near-test tie for {spec_to_str(self.spec)} not separable "
                "within the refinement cap"
            )
        self.width /= self.base ** 8
        self.lo, self.hi = self.spec._enclosure(self.width)

    def __call__(self, num: int, den: int) -> bool:
        r = Fraction(num, den)
        delta = self.delta
        while True:
            if r - delta < self.lo and r + delta > self.hi:
                return True
            if r + delta <= self.lo or r - delta >= self.hi:
                return False
            self._refine()


def near_tester(spec: RealSpec, base: int, n: int):
    """Callable (num, den) -> bool deciding |num/den - x| < base**-n exactly.

    Equivalent to within(spec, Fraction(num, den), base**-n) but reusable
    across the many candidate values of an enumeration; den must be
    positive, num may be any integer.
    """
    v = spec.exact_value()
    if v is not None:
        return _RationalNear(v, base, n)
    return _EnclosureNear(spec, base, n)


# ---------------------------------------------------------------------------
# canonical spec strings


def spec_to_str(spec: RealSpec) -> str:
    if isinstance(spec, Rational):
        return f"rat:{spec.num}/{spec.den}"
    if isinstance(spec, Champernowne):
        return f"champernowne:{spec.base}"
    if isinstance(spec, SquareRoot):
        return f"sqrt:{spec.radicand}"
    if isinstance(spec, Pseudorandom):
        return f"prand:{spec.seed}:{spec.base}"
    if isinstance(spec, DigitFile):
        return f"file:{spec.base}:{spec.path}"
    if isinstance(spec, Interleave):
        return f"{spec.parity}({spec_to_str(spec.parent)})"
    if isinstance(spec, Complement):
        return f"complement({spec_to_str(spec.inner)})"
    if isinstance(spec, Scale):
        q = spec.q
        qs = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        return f"scale({qs},{spec_to_str(spec.inner)})"
    raise SpecError(f"unknown spec type {type(spec).__name__}")


def parse_spec(text: str) -> RealSpec:
    """Parse the canonical spec syntax.

    Grammar:
        rat:N/D | champernowne:B | sqrt:N | prand:SEED:B | file:B:PATH
        | even(SPEC) | odd(SPEC) | complement(SPEC) | scale(Q,SPEC)
    """
    s = text.strip()
    try:
        return _parse_spec(s)
    except SpecError:
        raise
    except Exception as exc:
        raise SpecError(f"cannot parse spec {text!r}: {exc}") from exc


def _parse_spec(s: str) -> RealSpec:
    for name in ("even", "odd"):
        if s.startswith(name + "(") and s.endswith(")"):
            return Interleave(_parse_spec(s[len(name) + 1 : -1]), name)
    if s.startswith("complement(") and s.endswith(")"):
        return Complement(_parse_spec(s[len("complement(") : -1]))
    if s.startswith("scale(") and s.endswith(")"):
        body = s[len("scale(") : -1]
        qs, _, rest = body.partition(",")
        if not rest:
            raise SpecError("scale needs a factor and an inner spec")
        return Scale(Fraction(qs.strip()), _parse_spec(rest))
    head, _, rest = s.partition(":")
    if head == "rat":
        numtxt, _, dentxt = rest.partition("/")
        return Rational(int(numtxt), int(dentxt))
    if head == "champernowne":
        return Champernowne(int(rest))
    if head == "sqrt":
        return SquareRoot(int(rest))
    if head == "prand":
        seedtxt, _, basetxt = rest.partition(":")
        return Pseudorandom(int(seedtxt), int(basetxt))
    if head == "file":
        basetxt, _, path = rest.partition(":")
        if not path:
            raise SpecError("file spec needs file:BASE:PATH")
        return DigitFile(path, int(basetxt))
    raise SpecError(f"unknown spec {s!r}")


# ---------------------------------------------------------------------------
# digit cache files
#
# Line 1:   base=<b> spec=<canonical spec string>
# Line 2+:  digits; contiguous ASCII digits for base <= 10, otherwise
#           comma-separated decimal integers.  Rows may be any length and
#           are concatenated on read, so appending rows extends the stream.

_ROW = 5000
_ROW_WIDE = 1000


def write_digit_cache(path: str, base: int, spec_string: str, ds: list[int]) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(f"base={base} spec={spec_string}\n")
        _write_rows(fh, base, ds)
    os.replace(tmp, path)


def append_digit_cache(path: str, base: int, new_digits: list[int]) -> None:
    """Extend an existing cache file in place; existing rows are untouched."""
    with open(path, "a", encoding="ascii") as fh:
        _write_rows(fh, base, new_digits)


def _write_rows(fh, base: int, ds: list[int]) -> None:
    if base <= 10:
        for i in range(0, len(ds), _ROW):
            fh.write("".join(chr(48 + d) for d in ds[i : i + _ROW]))
            fh.write("\n")
    else:
        for i in range(0, len(ds), _ROW_WIDE):
            fh.write(",".join(str(d) for d in ds[i : i + _ROW_WIDE]))
            fh.write("\n")


def read_digit_cache(path: str) -> tuple[int, str, list[int]]:
    """Returns (base, spec_string, digits)."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        fields = dict(
            part.split("=", 1) for part in header.split(" ", 1) if "=" in part
        )
        if "base" not in fields or "spec" not in fields:
            raise SpecError(f"{path}: malformed cache header {header!r}")
        base = int(fields["base"])
        ds: list[int] = []
        if base <= 10:
            for line in fh:
                ds.extend(ord(c) - 48 for c in line.strip())
        else:
            for line in fh:
                line = line.strip()
                if line:
                    ds.extend(int(tok) for tok in line.split(","))
        for d in ds:
            if not 0 <= d < base:
                raise SpecError(f"{path}: digit {d} out of range for base {base}")
        return base, fields["spec"], ds
