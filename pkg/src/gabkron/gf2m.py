"""Arithmetic in the binary extension field GF(2^m).

Field elements are plain Python ints whose bits are the coefficients of a
polynomial over GF(2): bit i is the coefficient of x^i.  All arithmetic is
performed modulo an irreducible polynomial of degree m held by a FieldCtx.
Working on raw ints keeps the hot loops cheap; the FieldElement wrapper
carries its context for callers that want operator syntax and context
checking.

The modulus for each extension degree is the lexicographically smallest
irreducible polynomial of minimal weight (trinomial if one exists, else
pentanomial), so that serialized values are portable between runs.
"""

from __future__ import annotations

from functools import lru_cache


class ContextMismatchError(ValueError):
    """Raised when elements from different field contexts are combined."""


# Degree-indexed moduli (smallest minimal-weight irreducible, bit i = coeff
# of x^i).  Regenerated by smallest_irreducible(); test_gf2m cross-checks.
MODULI = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: 0b1000000011,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000000001001,
    16: (1 << 16) | (1 << 5) | (1 << 3) | (1 << 1) | 1,
    20: (1 << 20) | (1 << 3) | 1,
    24: (1 << 24) | (1 << 4) | (1 << 3) | (1 << 1) | 1,
    48: (1 << 48) | (1 << 5) | (1 << 3) | (1 << 2) | 1,
    76: (1 << 76) | (1 << 21) | 1,
    90: (1 << 90) | (1 << 27) | 1,
    104: (1 << 104) | (1 << 4) | (1 << 3) | (1 << 1) | 1,
    120: (1 << 120) | (1 << 4) | (1 << 3) | (1 << 1) | 1,
    128: (1 << 128) | (1 << 7) | (1 << 2) | (1 << 1) | 1,
    211: (1 << 211) | (1 << 11) | (1 << 10) | (1 << 8) | 1,
    307: (1 << 307) | (1 << 8) | (1 << 4) | (1 << 2) | 1,
    331: (1 << 331) | (1 << 10) | (1 << 6) | (1 << 2) | 1,
}

# Byte-indexed table spreading the 8 input bits to even positions; squaring
# a GF(2) polynomial just interleaves zeros between coefficients.
_SPREAD = []
for _v in range(256):
    _s = 0
    for _i in range(8):
        if _v >> _i & 1:
            _s |= 1 << (2 * _i)
    _SPREAD.append(_s)
del _v, _s, _i


def _poly_mulmod(a, b, mod, deg):
    """Multiply two GF(2) polynomials modulo mod (degree deg)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= mod
    # a stays reduced each step, so r has degree < deg already
    return r


def _poly_gcd(a, b):
    while b:
        if a.bit_length() < b.bit_length():
            a, b = b, a
            continue
        a ^= b << (a.bit_length() - b.bit_length())
    return a


def is_irreducible(poly: int, m: int) -> bool:
    """Deterministic irreducibility test for a degree-m polynomial over GF(2).

    Checks that x^(2^i) - x shares no factor with poly for i up to m/2,
    which rules out irreducible factors of every degree below m.
    """
    if poly >> m != 1 or not poly & 1:
        return False
    if m == 1:
        return True
    r = 2  # the polynomial x
    for _ in range(m // 2):
        r = _poly_mulmod(r, r, poly, m)
        if _poly_gcd(r ^ 2, poly) != 1:
            return False
    return True


def smallest_irreducible(m: int) -> int:
    """Lexicographically smallest irreducible of degree m with minimal weight."""
    if m == 1:
        return 0b10
    top = 1 << m
    for a in range(1, m):
        cand = top | (1 << a) | 1
        if is_irreducible(cand, m):
            return cand
    for c in range(3, m):
        for b in range(2, c):
            for a in range(1, b):
                cand = top | (1 << c) | (1 << b) | (1 << a) | 1
                if is_irreducible(cand, m):
                    return cand
    raise ValueError(f"no low-weight irreducible of degree {m}")


@lru_cache(maxsize=None)
def modulus_for_degree(m: int) -> int:
    """Registry modulus for GF(2^m); searched and cached when not tabulated."""
    if m in MODULI:
        return MODULI[m]
    return smallest_irreducible(m)


class FieldCtx:
    """GF(2^m) with an explicit irreducible modulus.

    Immutable after construction; safe to share across threads.  All methods
    take and return raw int elements.
    """

    def __init__(self, m: int, modulus: int | None = None):
        if not 2 <= m <= 512:
            raise ValueError(f"extension degree {m} out of range [2, 512]")
        if modulus is None:
            modulus = modulus_for_degree(m)
        if not is_irreducible(modulus, m):
            raise ValueError(f"modulus {modulus:#x} is not irreducible of degree {m}")
        self.m = m
        self.q = 2
        self.modulus = modulus
        self.mask = (1 << m) - 1
        self.nbytes = (m + 7) // 8
        # bit positions of x^m mod modulus, used to fold products
        red = modulus ^ (1 << m)
        self._red_shifts = tuple(i for i in range(m) if red >> i & 1)
        self._frob_cols: list[int] | None = None
        self._sqrt_cols: list[int] | None = None

    def __repr__(self):
        return f"FieldCtx(m={self.m}, modulus={self.modulus:#x})"

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and self.m == other.m
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.m, self.modulus))

    # -- core arithmetic on raw ints ------------------------------------

    def check(self, a: int) -> int:
        if a >> self.m:
            raise ValueError(f"value {a:#x} has degree >= m={self.m}")
        return a

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def reduce(self, v: int) -> int:
        """Reduce a polynomial of any degree to the canonical m-bit form."""
        m = self.m
        mask = self.mask
        shifts = self._red_shifts
        hi = v >> m
        while hi:
            v &= mask
            for s in shifts:
                v ^= hi << s
            hi = v >> m
        return v

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if b == 1:
            return a
        if a == 1:
            return b
        # 4-bit windowed carry-less multiply, then fold
        t2 = a << 1
        t4 = a << 2
        t8 = a << 3
        tab = [0, a, t2, t2 ^ a, t4, t4 ^ a, t4 ^ t2, t4 ^ t2 ^ a]
        tab += [x ^ t8 for x in tab]
        r = 0
        sh = 0
        while b:
            w = b & 15
            if w:
                r ^= tab[w] << sh
            sh += 4
            b >>= 4
        return self.reduce(r)

    def sqr(self, a: int) -> int:
        r = 0
        sh = 0
        while a:
            r |= _SPREAD[a & 255] << sh
            sh += 16
            a >>= 8
        return self.reduce(r)

    def inv(self, a: int) -> int:
        """Multiplicative inverse by the extended Euclidean algorithm."""
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^m)")
        if a == 1:
            return 1
        # invariant: u = s * a (mod modulus), v = t * a (mod modulus)
        u, v = a, self.modulus
        s, t = 1, 0
        while u != 1:
            du = u.bit_length()
            dv = v.bit_length()
            if du < dv:
                u, v = v, u
                s, t = t, s
                du, dv = dv, du
            sh = du - dv
            u ^= v << sh
            s ^= t << sh
        return self.reduce(s)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.sqr(a)
            e >>= 1
        return r

    def frobenius(self, a: int, i: int) -> int:
        """a^(2^i); the bracket power a^[i].  frobenius(a, m) == a."""
        if i < 0:
            raise ValueError("frobenius power must be non-negative")
        for _ in range(i % self.m):
            a = self.sqr(a)
        return a

    # -- base-field structure --------------------------------------------

    def _frobenius_columns(self) -> list[int]:
        """Column i = coefficients of x^(2i) mod f: squaring as an F_2 map."""
        if self._frob_cols is None:
            self._frob_cols = [self.sqr(1 << i) for i in range(self.m)]
        return self._frob_cols

    def _sqrt_columns(self) -> list[int]:
        """Columns of the inverse of the squaring map (square roots)."""
        if self._sqrt_cols is None:
            cols = self._frobenius_columns()
            self._sqrt_cols = _invert_bit_columns(cols, self.m)
        return self._sqrt_cols

    def sqrt(self, a: int) -> int:
        """Unique square root in characteristic 2 (inverse Frobenius)."""
        cols = self._sqrt_columns()
        r = 0
        i = 0
        while a:
            if a & 1:
                r ^= cols[i]
            a >>= 1
            i += 1
        return r

    def is_normal(self, a: int) -> bool:
        """True iff the Frobenius orbit of a is an F_2-basis of the field."""
        if a == 0:
            return False
        rows = []
        v = a
        for _ in range(self.m):
            rows.append(v)
            v = self.sqr(v)
        return _bit_rank(rows) == self.m

    def find_normal_element(self, rng) -> int:
        """First normal element drawn from rng; deterministic for seeded rng."""
        for _ in range(4096):
            a = rng.element(self.m)
            if self.is_normal(a):
                return a
        raise RuntimeError("no normal element in 4096 draws (implementation bug)")

    # -- serialization -----------------------------------------------------

    def to_bytes(self, a: int) -> bytes:
        """ceil(m/8) bytes, little-endian bit order (x^0 is bit 0 of byte 0)."""
        return self.check(a).to_bytes(self.nbytes, "little")

    def from_bytes(self, data: bytes) -> int:
        if len(data) != self.nbytes:
            raise ValueError(f"expected {self.nbytes} bytes, got {len(data)}")
        v = int.from_bytes(data, "little")
        if v >> self.m:
            raise ValueError("non-zero padding bits above degree m-1")
        return v

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, self.check(value))


def _bit_rank(rows) -> int:
    """Rank over GF(2) of rows given as bitmask ints."""
    pivots = []
    rank = 0
    for r in rows:
        for p in pivots:
            nb = r ^ p
            if nb < r:
                r = nb
        if r:
            pivots.append(r)
            pivots.sort(reverse=True)
            rank += 1
    return rank


def _invert_bit_columns(cols, n):
    """Invert an n x n F_2 matrix given as column bitmasks."""
    rows = [0] * n
    for j, c in enumerate(cols):
        for i in range(n):
            if c >> i & 1:
                rows[i] |= 1 << j
    aug = [(rows[i] << n) | (1 << i) for i in range(n)]
    # forward + back substitution on [M | I] bit rows (identity in low bits)
    pos = 0
    for col in range(n):
        bit = 1 << (n + col)
        piv = next((i for i in range(pos, n) if aug[i] & bit), None)
        if piv is None:
            raise ZeroDivisionError("bit matrix is singular")
        aug[pos], aug[piv] = aug[piv], aug[pos]
        for i in range(n):
            if i != pos and aug[i] & bit:
                aug[i] ^= aug[pos]
        pos += 1
    inv_rows = [r & ((1 << n) - 1) for r in aug]
    out_cols = [0] * n
    for i, r in enumerate(inv_rows):
        for j in range(n):
            if r >> j & 1:
                out_cols[j] |= 1 << i
    return out_cols


class FieldElement:
    """A field value bound to its FieldCtx.

    Thin wrapper over the int representation; mixing elements from
    different contexts raises ContextMismatchError.
    """

    __slots__ = ("ctx", "value")

    def __init__(self, ctx: FieldCtx, value: int):
        self.ctx = ctx
        self.value = ctx.check(value)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise ContextMismatchError(
                    f"cannot combine elements of {self.ctx} and {other.ctx}"
                )
            return other.value
        if isinstance(other, int):
            return self.ctx.check(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.value ^ v)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul(self.value, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.div(self.value, v))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.value))

    def frobenius(self, i: int) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.frobenius(self.value, i))

    def is_normal(self) -> bool:
        return self.ctx.is_normal(self.value)

    def to_bytes(self) -> bytes:
        return self.ctx.to_bytes(self.value)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.value))

    def __bool__(self):
        return bool(self.value)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElement({self.value:#x} in GF(2^{self.ctx.m}))"
