"""Shared fixtures and independent oracles for the test suite.

The oracles here stay deliberately naive: rank computation by fraction
Gaussian elimination, modular homology by enumerating small modules, and a
combinatorial surface triangulation whose boundary matrices are written
down directly.  The library is then required to agree with them.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

import pytest

from morseflow import ChainComplexData, FilteredRealization, IntegerMatrix


# -- simplicial torus oracle ------------------------------------------------


def seven_vertex_torus() -> ChainComplexData:
    """The 7-vertex triangulated torus as a simplicial chain complex.

    Triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7; the edge set is the
    complete graph on 7 vertices.  Closed surface, Euler characteristic 0.
    """
    tris = []
    for i in range(7):
        tris.append(tuple(sorted((i % 7, (i + 1) % 7, (i + 3) % 7))))
        tris.append(tuple(sorted((i % 7, (i + 2) % 7, (i + 3) % 7))))
    tris = sorted(tris)
    edges = sorted({(a, b) for t in tris for a in t for b in t if a < b})
    assert len(tris) == 14 and len(edges) == 21
    e_ix = {e: k for k, e in enumerate(edges)}
    d1 = [[0] * len(edges) for _ in range(7)]
    for k, (a, b) in enumerate(edges):
        d1[b][k] += 1
        d1[a][k] -= 1
    d2 = [[0] * len(tris) for _ in range(len(edges))]
    for k, (a, b, c) in enumerate(tris):
        d2[e_ix[(b, c)]][k] += 1
        d2[e_ix[(a, c)]][k] -= 1
        d2[e_ix[(a, b)]][k] += 1
    return ChainComplexData(
        (
            tuple(f"v{i}" for i in range(7)),
            tuple(f"e{a}.{b}" for a, b in edges),
            tuple("t" + "".join(map(str, t)) for t in tris),
        ),
        (IntegerMatrix(d1), IntegerMatrix(d2)),
    )


@pytest.fixture(scope="session")
def torus_triangulation() -> ChainComplexData:
    return seven_vertex_torus()


# -- rank oracle over the rationals -----------------------------------------


def rational_rank(a: IntegerMatrix) -> int:
    """Row rank by plain fraction Gaussian elimination."""
    rows = [[Fraction(v) for v in row] for row in a.to_rows()]
    rank = 0
    col = 0
    n_rows, n_cols = a.shape
    while rank < n_rows and col < n_cols:
        piv = next((r for r in range(rank, n_rows) if rows[r][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        lead = rows[rank][col]
        for r in range(rank + 1, n_rows):
            if rows[r][col]:
                factor = rows[r][col] / lead
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


# -- modular homology oracle by enumeration ---------------------------------


def _mod_image(a: IntegerMatrix, m: int) -> frozenset:
    n_rows, n_cols = a.shape
    out = set()

    def rec(j, acc):
        if j == n_cols:
            out.add(tuple(v % m for v in acc))
            return
        col = a.column(j)
        for c in range(m):
            rec(j + 1, [v + c * w for v, w in zip(acc, col)])

    rec(0, [0] * n_rows)
    return frozenset(out)


def _mod_kernel(a: IntegerMatrix, m: int) -> list[tuple]:
    n_rows, n_cols = a.shape
    ker = []

    def rec(j, vec):
        if j == n_cols:
            image = [0] * n_rows
            for k, c in enumerate(vec):
                if c:
                    col = a.column(k)
                    image = [v + c * w for v, w in zip(image, col)]
            if all(v % m == 0 for v in image):
                ker.append(tuple(vec))
            return
        for c in range(m):
            rec(j + 1, vec + [c])

    rec(0, [])
    return ker


def brute_mod_order_profile(d_in: IntegerMatrix, d_out: IntegerMatrix, m: int):
    """Multiset of element orders of ker(d_out)/im(d_in) over Z/m, by enumeration."""
    ker = _mod_kernel(d_out, m)
    im = _mod_image(d_in, m)
    seen_cosets = set()
    profile: dict[int, int] = {}
    for g in ker:
        coset = tuple(sorted(tuple((a + b) % m for a, b in zip(g, h)) for h in im))
        if coset in seen_cosets:
            continue
        seen_cosets.add(coset)
        order = next(
            k
            for k in range(1, m + 1)
            if tuple((k * v) % m for v in g) in im
        )
        profile[order] = profile.get(order, 0) + 1
    return profile


def claimed_order_profile(cyclic_orders: list[int]):
    """Element-order multiset of a direct sum of cyclic groups Z/c."""
    orders = [c for c in cyclic_orders if c > 1]
    profile: dict[int, int] = {}

    def rec(i, cur_lcm):
        if i == len(orders):
            profile[cur_lcm] = profile.get(cur_lcm, 0) + 1
            return
        for x in range(orders[i]):
            o = orders[i] // gcd(x, orders[i])
            rec(i + 1, cur_lcm * o // gcd(cur_lcm, o))

    rec(0, 1)
    return profile


# -- random valid filtered complexes ----------------------------------------


def random_filtered_complex(rng: random.Random):
    """A chain complex plus level-skipping components with square-zero total.

    Generators at every level are split into sources and targets; every
    component only maps source columns into target rows, so any two-step
    composite vanishes identically while individual components, including
    the level-skipping ones, stay genuinely nonzero.
    """
    top = rng.randint(2, 4)
    ranks = [rng.randint(1, 5) for _ in range(top + 1)]
    bases = tuple(
        tuple(f"g{i}.{k}" for k in range(ranks[i])) for i in range(top + 1)
    )
    roles = [
        [rng.random() < 0.5 for _ in range(ranks[i])] for i in range(top + 1)
    ]  # True = may receive (target row), False = may emit (source column)

    def component(p, q):
        rows = []
        for i in range(ranks[q]):
            row = []
            for j in range(ranks[p]):
                if roles[q][i] and not roles[p][j]:
                    row.append(rng.randint(-3, 3))
                else:
                    row.append(0)
            rows.append(row)
        return IntegerMatrix(rows, cols=ranks[p])

    boundaries = tuple(component(i, i - 1) for i in range(1, top + 1))
    higher = {}
    for p in range(2, top + 1):
        for q in range(p - 1):
            mat = component(p, q)
            if not mat.is_zero():
                higher[(p, q)] = mat
    cx = ChainComplexData(bases, boundaries)
    return cx, higher


def tampered_copy(x: FilteredRealization, rng: random.Random) -> FilteredRealization:
    """Perturb one random entry of one adjacent component."""
    p = rng.randint(1, x.complex.top_degree)
    mat = x.component(p, p - 1)
    rows = mat.to_rows()
    i = rng.randrange(len(rows))
    j = rng.randrange(len(rows[0]))
    rows[i][j] += rng.choice((1, -1))
    comps = dict(x.components)
    comps[(p, p - 1)] = IntegerMatrix(rows, cols=mat.shape[1])
    return FilteredRealization(x.complex, x.ring, comps)


# -- acceptance reporting ---------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    """Store and echo one verdict line for the acceptance summary."""
    line = f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
