"""Integer sublattices of Z^n via row-style Hermite normal form.

Only exact integer arithmetic is used.  The reduction keeps track of the
unimodular transform so that membership tests can return a witness
expressed in the caller's original generators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

Vector = tuple[int, ...]


@dataclass(frozen=True)
class HNF:
    """Echelon basis ``rows`` with ``rows = transform * generators``.

    Pivots are positive; entries above each pivot lie in ``[0, pivot)``.
    """

    dim: int
    rows: tuple[Vector, ...]
    pivots: tuple[int, ...]
    transform: tuple[Vector, ...]
    n_generators: int

    @property
    def rank(self) -> int:
        return len(self.rows)


def hermite_normal_form(generators: Sequence[Sequence[int]], dim: int) -> HNF:
    gens = [list(map(int, g)) for g in generators]
    for g in gens:
        if len(g) != dim:
            raise ValueError(f"generator {g} does not have length {dim}")
    k = len(gens)
    a = [row[:] for row in gens]
    u = [[int(i == j) for j in range(k)] for i in range(k)]
    pivots: list[int] = []
    r = 0
    for col in range(dim):
        # gcd-eliminate column ``col`` below row r
        while True:
            nz = [i for i in range(r, k) if a[i][col] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][col]))
            a[r], a[p] = a[p], a[r]
            u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, k):
                if a[i][col]:
                    q = a[i][col] // a[r][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if a[i][col]:
                        done = False
            if done:
                break
        if r < k and a[r][col] != 0:
            if a[r][col] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            for i in range(r):
                q = a[i][col] // a[r][col]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            pivots.append(col)
            r += 1
            if r == k:
                break
    return HNF(
        dim=dim,
        rows=tuple(tuple(row) for row in a[:r]),
        pivots=tuple(pivots),
        transform=tuple(tuple(row) for row in u[:r]),
        n_generators=k,
    )


def reduce(h: HNF, vec: Sequence[int]) -> tuple[Vector, Vector]:
    """Return ``(residue, coeffs)`` with ``vec = residue + coeffs . rows``.

    The residue is the canonical representative of ``vec`` modulo the
    lattice: its pivot coordinates lie in ``[0, pivot)``.
    """
    v = list(map(int, vec))
    coeffs = [0] * h.rank
    for i, (row, col) in enumerate(zip(h.rows, h.pivots)):
        q = v[col] // row[col]
        if q:
            coeffs[i] = q
            v = [x - q * y for x, y in zip(v, row)]
    return tuple(v), tuple(coeffs)


def membership(h: HNF, vec: Sequence[int]) -> Vector | None:
    """Integer coefficients over the original generators, or None."""
    residue, coeffs = reduce(h, vec)
    if any(residue):
        return None
    out = [0] * h.n_generators
    for c, trow in zip(coeffs, h.transform):
        for j, t in enumerate(trow):
            out[j] += c * t
    return tuple(out)


def combine(generators: Sequence[Sequence[int]], coeffs: Sequence[int], dim: int) -> Vector:
    out = [0] * dim
    for c, g in zip(coeffs, generators):
        for j, x in enumerate(g):
            out[j] += c * x
    return tuple(out)
