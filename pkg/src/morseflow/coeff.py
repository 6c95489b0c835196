"""Exact integer linear algebra, coefficient rings, and chain homology.

Everything here runs on arbitrary-precision Python integers.  The Smith
normal form uses a deterministic pivot rule (smallest nonzero absolute
value, ties broken by lowest row then column) so that repeated runs produce
identical transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import (
    CompositeNonzeroError,
    DimensionMismatchError,
    InputError,
    WindowOverflowError,
)


class IntegerMatrix:
    """Dense row-major matrix over the integers."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Sequence[Sequence[int]], cols: int | None = None):
        e = [[int(v) for v in row] for row in entries]
        self.rows = len(e)
        if e:
            width = len(e[0])
            if any(len(row) != width for row in e):
                raise InputError("ragged matrix rows")
            if cols is not None and cols != width:
                raise InputError("explicit column count disagrees with row width")
            self.cols = width
        else:
            self.cols = 0 if cols is None else int(cols)
        self._e = e

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        return self._e[i][j]

    def to_rows(self) -> list[list[int]]:
        return [row[:] for row in self._e]

    def column(self, j: int) -> list[int]:
        return [row[j] for row in self._e]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self._e for v in row)

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(
            [[self._e[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        ot = other._e
        out = []
        for row in self._e:
            acc = [0] * other.cols
            for k, a in enumerate(row):
                if a:
                    ork = ot[k]
                    for j in range(other.cols):
                        acc[j] += a * ork[j]
            out.append(acc)
        return IntegerMatrix(out, cols=other.cols)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError("shape mismatch in addition")
        return IntegerMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._e, other._e)],
            cols=self.cols,
        )

    def __neg__(self) -> "IntegerMatrix":
        return IntegerMatrix([[-v for v in row] for row in self._e], cols=self.cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self._e)))

    def __repr__(self) -> str:
        return f"IntegerMatrix({self._e!r})" if self.rows else f"IntegerMatrix([], cols={self.cols})"

    def determinant(self) -> int:
        """Exact determinant via fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise DimensionMismatchError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def to_json(self) -> list[list[int]]:
        return self.to_rows()


def _select_pivot(d: list[list[int]], t: int, m: int, n: int) -> tuple[int, int] | None:
    """Smallest nonzero |entry| in the trailing submatrix, lowest (row, col) on ties."""
    best = None
    best_abs = None
    for i in range(t, m):
        di = d[i]
        for j in range(t, n):
            v = di[j]
            if v:
                a = -v if v < 0 else v
                if best_abs is None or a < best_abs:
                    best_abs = a
                    best = (i, j)
    return best


def smith_normal_form(
    a: IntegerMatrix,
) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Return (U, D, V) with U @ a @ V == D, U and V unimodular.

    D is diagonal with nonnegative entries satisfying d1 | d2 | ... .
    """
    m, n = a.rows, a.cols
    d = a.to_rows()
    u = IntegerMatrix.identity(m).to_rows()
    v = IntegerMatrix.identity(n).to_rows()
    t = 0
    limit = min(m, n)
    while t < limit:
        piv = _select_pivot(d, t, m, n)
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            d[t], d[pi] = d[pi], d[t]
            u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in d:
                row[t], row[pj] = row[pj], row[t]
            for row in v:
                row[t], row[pj] = row[pj], row[t]
        pivot = d[t][t]
        # Clear column t below the pivot and row t to its right.
        for i in range(t + 1, m):
            q = d[i][t] // pivot
            if q:
                dt, ut = d[t], u[t]
                di, ui = d[i], u[i]
                for j in range(n):
                    di[j] -= q * dt[j]
                for j in range(m):
                    ui[j] -= q * ut[j]
        for j in range(t + 1, n):
            q = d[t][j] // pivot
            if q:
                for row in d:
                    row[j] -= q * row[t]
                for row in v:
                    row[j] -= q * row[t]
        if any(d[i][t] for i in range(t + 1, m)) or any(
            d[t][j] for j in range(t + 1, n)
        ):
            continue  # remainders are strictly smaller; re-select the pivot
        # Divisibility repair: the pivot must divide the rest of the submatrix.
        witness = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if d[i][j] % pivot:
                    witness = i
                    break
            if witness is not None:
                break
        if witness is not None:
            dt, ut = d[t], u[t]
            dw, uw = d[witness], u[witness]
            for j in range(n):
                dt[j] += dw[j]
            for j in range(m):
                ut[j] += uw[j]
            continue
        t += 1
    for i in range(limit):
        if d[i][i] < 0:
            for j in range(n):
                d[i][j] = -d[i][j]
            for j in range(m):
                u[i][j] = -u[i][j]
    return (
        IntegerMatrix(u, cols=m),
        IntegerMatrix(d, cols=n),
        IntegerMatrix(v, cols=n),
    )


def invariant_factors(a: IntegerMatrix) -> list[int]:
    """Positive diagonal entries of the Smith form, in divisibility order."""
    _, d, _ = smith_normal_form(a)
    out = []
    for i in range(min(a.rows, a.cols)):
        if d[i, i]:
            out.append(d[i, i])
    return out


def matrix_rank(a: IntegerMatrix) -> int:
    return len(invariant_factors(a))


# -- coefficient rings ------------------------------------------------------


class RingKind(Enum):
    INTEGERS = "z"
    MODULAR = "zmod"
    RATIONALS = "q"
    LAURENT = "laurent"


@dataclass(frozen=True)
class CoefficientRing:
    """Supported coefficient systems for homology computations.

    The graded Laurent variant is a window-truncated stand-in for a graded
    unit ring with one invertible generator of fixed even degree: elements
    only carry generator powers p with |p| <= truncation, and operations
    that would leave the window raise instead of silently truncating.
    """

    kind: RingKind
    modulus: int | None = None
    generator_degree: int | None = None
    truncation: int | None = None

    def __post_init__(self):
        if self.kind is RingKind.MODULAR:
            if self.modulus is None or self.modulus < 2:
                raise InputError("modulus must be an integer >= 2")
        elif self.kind is RingKind.LAURENT:
            d, w = self.generator_degree, self.truncation
            if d is None or d <= 0 or d % 2:
                raise InputError("generator degree must be a positive even integer")
            if w is None or w <= 0:
                raise InputError("truncation window must be a positive integer")
        else:
            if self.modulus is not None or self.generator_degree is not None:
                raise InputError("unexpected parameters for this ring kind")

    @classmethod
    def integers(cls) -> "CoefficientRing":
        return cls(RingKind.INTEGERS)

    @classmethod
    def modular(cls, m: int) -> "CoefficientRing":
        return cls(RingKind.MODULAR, modulus=int(m))

    @classmethod
    def rationals(cls) -> "CoefficientRing":
        return cls(RingKind.RATIONALS)

    @classmethod
    def laurent(cls, generator_degree: int, truncation: int) -> "CoefficientRing":
        return cls(
            RingKind.LAURENT,
            generator_degree=int(generator_degree),
            truncation=int(truncation),
        )

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        """Parse ring codes: z, q, zmod:m, laurent:degree:window."""
        parts = text.strip().lower().split(":")
        try:
            if parts == ["z"]:
                return cls.integers()
            if parts == ["q"]:
                return cls.rationals()
            if parts[0] == "zmod" and len(parts) == 2:
                return cls.modular(int(parts[1]))
            if parts[0] == "laurent" and len(parts) == 3:
                return cls.laurent(int(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise InputError(f"bad ring code {text!r}: {exc}") from None
        raise InputError(f"unknown ring code {text!r}")

    def spec_string(self) -> str:
        if self.kind is RingKind.INTEGERS:
            return "z"
        if self.kind is RingKind.RATIONALS:
            return "q"
        if self.kind is RingKind.MODULAR:
            return f"zmod:{self.modulus}"
        return f"laurent:{self.generator_degree}:{self.truncation}"

    @property
    def is_field(self) -> bool:
        if self.kind is RingKind.RATIONALS:
            return True
        if self.kind is RingKind.MODULAR:
            return _is_prime(self.modulus)
        return False


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _invariant_chain(orders: Iterable[int]) -> list[int]:
    """Normalize a multiset of cyclic orders into a divisibility chain d1 | d2 | ..."""
    exponents: dict[int, list[int]] = {}
    for o in orders:
        for p, e in _factorize(o).items():
            exponents.setdefault(p, []).append(e)
    slots = max((len(v) for v in exponents.values()), default=0)
    chain = []
    for t in range(slots):
        f = 1
        for p, es in exponents.items():
            es_sorted = sorted(es, reverse=True)
            if t < len(es_sorted):
                f *= p ** es_sorted[t]
        chain.append(f)
    chain.reverse()
    return chain


@dataclass(frozen=True)
class LaurentElement:
    """Element of the truncated graded unit ring: integer coefficients per generator power."""

    ring: CoefficientRing
    coeffs: tuple[tuple[int, int], ...]  # sorted (power, coefficient) pairs

    @classmethod
    def of(cls, ring: CoefficientRing, coeffs: Mapping[int, int]) -> "LaurentElement":
        if ring.kind is not RingKind.LAURENT:
            raise InputError("LaurentElement requires a graded Laurent ring")
        w = ring.truncation
        clean = {}
        for p, c in coeffs.items():
            if abs(p) > w:
                raise WindowOverflowError(
                    f"power {p} outside window [-{w}, {w}]"
                )
            if c:
                clean[int(p)] = int(c)
        return cls(ring, tuple(sorted(clean.items())))

    def _check(self, other: "LaurentElement"):
        if self.ring != other.ring:
            raise InputError("mixed Laurent rings")

    def __add__(self, other: "LaurentElement") -> "LaurentElement":
        self._check(other)
        acc = dict(self.coeffs)
        for p, c in other.coeffs:
            acc[p] = acc.get(p, 0) + c
        return LaurentElement.of(self.ring, acc)

    def __neg__(self) -> "LaurentElement":
        return LaurentElement.of(self.ring, {p: -c for p, c in self.coeffs})

    def __mul__(self, other: "LaurentElement") -> "LaurentElement":
        self._check(other)
        acc: dict[int, int] = {}
        for p, c in self.coeffs:
            for q, d in other.coeffs:
                if c * d:
                    acc[p + q] = acc.get(p + q, 0) + c * d
        return LaurentElement.of(self.ring, acc)


# -- homology ---------------------------------------------------------------


@dataclass(frozen=True)
class HomologyGroup:
    """Finitely generated module presented as free rank plus cyclic torsion.

    The torsion orders form a divisibility chain d1 | d2 | ... with every
    d >= 2.  For the graded Laurent ring, `graded` maps each generator power
    in the window to the group replicated in that slot.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()
    graded: tuple[tuple[int, "HomologyGroup"], ...] | None = None

    def __post_init__(self):
        if self.free_rank < 0:
            raise InputError("negative free rank")
        prev = None
        for d in self.torsion:
            if d < 2:
                raise InputError("torsion orders must be >= 2")
            if prev is not None and d % prev:
                raise InputError("torsion orders must form a divisibility chain")
            prev = d

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        out: dict = {"freeRank": self.free_rank, "torsion": list(self.torsion)}
        if self.graded is not None:
            out["graded"] = [
                {"power": p, "freeRank": g.free_rank, "torsion": list(g.torsion)}
                for p, g in self.graded
            ]
        return out


def homology(
    d_in: IntegerMatrix, d_out: IntegerMatrix, ring: CoefficientRing
) -> HomologyGroup:
    """Homology ker(d_out) / im(d_in) at the middle of C --d_in--> C' --d_out--> C''.

    `d_in` maps the degree above into the middle term (its rows index the
    middle basis) and `d_out` maps the middle term down.  The integral answer
    is converted to the requested ring; for a modulus m the reduction
    includes the torsion contribution inherited from the degree below, read
    off the invariant factors of `d_out`.
    """
    if d_out.cols != d_in.rows:
        raise DimensionMismatchError(
            f"boundary shapes incompatible: d_out has {d_out.cols} columns, "
            f"d_in has {d_in.rows} rows"
        )
    if not (d_out @ d_in).is_zero():
        raise CompositeNonzeroError("d_out @ d_in is nonzero")
    n = d_in.rows
    fac_in = invariant_factors(d_in)
    fac_out = invariant_factors(d_out)
    free = n - len(fac_out) - len(fac_in)
    torsion = tuple(f for f in fac_in if f > 1)

    if ring.kind is RingKind.INTEGERS:
        return HomologyGroup(free, torsion)
    if ring.kind is RingKind.RATIONALS:
        return HomologyGroup(free)
    if ring.kind is RingKind.MODULAR:
        m = ring.modulus
        orders = [m] * free
        orders += [math.gcd(f, m) for f in torsion]
        orders += [math.gcd(f, m) for f in fac_out if f > 1]
        chain = _invariant_chain(o for o in orders if o > 1)
        free_m = sum(1 for d in chain if d == m)
        return HomologyGroup(free_m, tuple(d for d in chain if d != m))
    # Graded Laurent: the integral answer replicated across the power window.
    base = HomologyGroup(free, torsion)
    w = ring.truncation
    graded = tuple((p, base) for p in range(-w, w + 1))
    return HomologyGroup(free, torsion, graded=graded)
