"""Coefficient rings: prime fields, the rationals and the integers.

Matrices are plain numpy arrays.  Over a prime field with p < 2**31 they
carry dtype int64 with entries in [0, p); everywhere else they are object
arrays holding Python ints or Fractions, so arithmetic stays exact.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

# (p - 1)**2 * inner < 2**63 keeps an int64 matmul exact before reduction
_INT64_LIMIT = 2**63 - 1


_TRIAL_LIMIT = 10**12
# Miller-Rabin with these bases is exact for every n < 3.3 * 10**24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Trial division up to 10**12, deterministic Miller-Rabin above."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n < _TRIAL_LIMIT:
        f = 3
        while f * f <= n:
            if n % f == 0:
                return False
            f += 2
        return True
    if n >= 3.3e24:
        raise ValueError("primality of moduli above 3.3e24 is not certified")
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _scaled_ints(a: np.ndarray):
    """(integer object array, L) with a == result / L."""
    dens = {x.denominator for x in a.flat if isinstance(x, Fraction) and x.denominator != 1}
    L = 1
    for d in dens:
        L = L * d // math.gcd(L, d)
    out = np.empty(a.shape, dtype=object)
    for k, x in enumerate(a.flat):
        out.flat[k] = int(x * L) if L != 1 or isinstance(x, Fraction) else int(x)
    return out, L


class Ring:
    """One of F_p, Q or Z.  Instances are immutable and compare by value."""

    __slots__ = ("kind", "p", "_machine", "_dot_limit")

    def __init__(self, kind: str, p: int = 0):
        if kind not in ("Fp", "Q", "Z"):
            raise ValueError(f"unknown ring kind {kind!r}")
        if kind == "Fp" and not is_prime(p):
            raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "p", p if kind == "Fp" else 0)
        machine = kind == "Fp" and p < 2**31
        object.__setattr__(self, "_machine", machine)
        # longest inner dimension whose int64 dot products cannot overflow
        object.__setattr__(self, "_dot_limit", _INT64_LIMIT // max((p - 1) ** 2, 1) if machine else 0)

    def __setattr__(self, name, value):
        raise AttributeError("Ring is immutable")

    @classmethod
    def prime_field(cls, p: int) -> "Ring":
        return cls("Fp", p)

    @classmethod
    def rationals(cls) -> "Ring":
        return cls("Q")

    @classmethod
    def integers(cls) -> "Ring":
        return cls("Z")

    @classmethod
    def parse(cls, name: str) -> "Ring":
        name = name.strip()
        if name == "Q":
            return cls.rationals()
        if name == "Z":
            return cls.integers()
        if name.startswith("F") and name[1:].isdigit():
            return cls.prime_field(int(name[1:]))
        raise ValueError(f"unknown ring {name!r} (expected Fp, Q or Z)")

    # -- identity ---------------------------------------------------------
    @property
    def name(self) -> str:
        return f"F{self.p}" if self.kind == "Fp" else self.kind

    def __repr__(self):
        return f"Ring({self.name})"

    def __eq__(self, other):
        return isinstance(other, Ring) and (self.kind, self.p) == (other.kind, other.p)

    def __hash__(self):
        return hash((self.kind, self.p))

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def machine(self) -> bool:
        """True when matrices use int64 storage (small prime fields)."""
        return self._machine

    @property
    def dtype(self):
        return np.int64 if self.machine else object

    # -- scalars ----------------------------------------------------------
    def coerce(self, x):
        if self.kind == "Fp":
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        if self.kind == "Q":
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def inv(self, x):
        if self.kind == "Fp":
            return pow(int(x), -1, self.p)
        if self.kind == "Q":
            return 1 / Fraction(x)
        if x in (1, -1):
            return int(x)
        raise ZeroDivisionError(f"{x} is not a unit in Z")

    def format(self, x) -> str:
        if self.kind == "Q":
            x = Fraction(x)
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return str(int(x))

    def parse_element(self, s: str):
        s = s.strip()
        if self.kind == "Q":
            return Fraction(s)
        if "/" in s:
            return self.coerce(Fraction(s))
        return self.coerce(int(s))

    # -- arrays -----------------------------------------------------------
    def array(self, data, shape=None) -> np.ndarray:
        if isinstance(data, np.ndarray) and data.dtype != object and self.machine:
            a = np.asarray(data, dtype=np.int64) % self.p
        else:
            raw = np.asarray(data, dtype=object)
            a = np.empty(raw.shape, dtype=object)
            flat, out = raw.reshape(-1), a.reshape(-1)
            for n, x in enumerate(flat):
                out[n] = self.coerce(x)
            if self.machine:
                a = a.astype(np.int64)
        if shape is not None:
            a = a.reshape(shape)
        return a

    def zeros(self, shape) -> np.ndarray:
        if self.machine:
            return np.zeros(shape, dtype=np.int64)
        z = np.empty(shape, dtype=object)
        z.fill(Fraction(0) if self.kind == "Q" else 0)
        return z

    def eye(self, n: int) -> np.ndarray:
        a = self.zeros((n, n))
        one = Fraction(1) if self.kind == "Q" else 1
        for k in range(n):
            a[k, k] = one
        return a

    def reduce(self, a: np.ndarray) -> np.ndarray:
        if self.kind == "Fp":
            return a % self.p
        return a

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[-1] == 0 or (b.ndim and b.shape[0] == 0):
            out_shape = a.shape[:-1] + b.shape[1:]
            return self.zeros(out_shape)
        if self._machine:
            if a.shape[-1] <= self._dot_limit:
                return (a @ b) % self.p
            return ((a.astype(object) @ b.astype(object)) % self.p).astype(np.int64)
        out = a @ b
        return out % self.p if self.kind == "Fp" else out

    def tensordot(self, a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
        if self._machine:
            ax_a = axes[0] if isinstance(axes[0], (list, tuple)) else [axes[0]]
            inner = math.prod(a.shape[k] for k in ax_a)
            if inner <= self._dot_limit:
                return np.tensordot(a, b, axes=axes) % self.p
            return (np.tensordot(a.astype(object), b.astype(object), axes=axes) % self.p).astype(np.int64)
        out = np.tensordot(a, b, axes=axes)
        if out.dtype != object:
            out = out.astype(object)
        return out % self.p if self.kind == "Fp" else out

    def einsum(self, spec: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact two-operand einsum (int64 when no overflow is possible)."""
        ins, out = spec.split("->")
        ia, ib = ins.split(",")
        sizes = dict(zip(ia, a.shape))
        sizes.update(zip(ib, b.shape))
        inner = 1
        for c in set(ia + ib) - set(out):
            inner *= sizes[c]
        if self.machine:
            if (self.p - 1) ** 2 * max(inner, 1) <= _INT64_LIMIT:
                return np.einsum(spec, a, b) % self.p
            return (np.einsum(spec, a.astype(object), b.astype(object)) % self.p).astype(np.int64)
        if 0 in a.shape or 0 in b.shape:
            return self.zeros(tuple(sizes[c] for c in out))
        if self.kind != "Fp":
            return self._einsum_exact(spec, a, b, inner)
        res = np.einsum(spec, a, b)
        if not isinstance(res, np.ndarray) or res.dtype != object:
            res = np.asarray(res, dtype=object)
        return res % self.p if self.kind == "Fp" else res

    def _einsum_exact(self, spec, a, b, inner):
        # clear denominators and use int64 when the result cannot overflow
        A, la = _scaled_ints(a)
        B, lb = _scaled_ints(b)
        ma = max((abs(x) for x in A.flat), default=0)
        mb = max((abs(x) for x in B.flat), default=0)
        if ma * mb * max(inner, 1) <= _INT64_LIMIT:
            res = np.einsum(spec, A.astype(np.int64), B.astype(np.int64)).astype(object)
        else:
            res = np.asarray(np.einsum(spec, A, B), dtype=object)
        den = la * lb
        if self.kind == "Z":
            return res
        out = np.empty(res.shape, dtype=object)
        for k, x in enumerate(res.flat):
            out.flat[k] = Fraction(int(x), den)
        return out

    def scale(self, a: np.ndarray, c) -> np.ndarray:
        c = self.coerce(c)
        if self.machine:
            return (a * c) % self.p
        out = a * c
        return out % self.p if self.kind == "Fp" else out

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def is_zero(self, a) -> bool:
        if isinstance(a, np.ndarray) and a.dtype != object:
            return not a.any()
        return not np.any(np.asarray(a) != 0)

    def random_array(self, rng: np.random.Generator, shape, lo: int = -2, hi: int = 2) -> np.ndarray:
        raw = rng.integers(lo, hi + 1, size=shape)
        return self.array(raw.astype(object) if not self.machine else raw)
