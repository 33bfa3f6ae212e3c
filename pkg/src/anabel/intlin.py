"""Exact integer linear algebra: Smith normal form and f.g. abelian groups.

Everything here works with plain Python integers, so there is no overflow;
pivot growth in the Smith reduction is harmless at the matrix sizes this
package deals with (a few hundred entries at most).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Tuple


class IntMatrix:
    """Immutable dense integer matrix, row-major storage."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[int]):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        entries = tuple(int(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError(
                f"expected {rows * cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "IntMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        if any(len(r) != m for r in rows):
            raise ValueError("ragged rows")
        return cls(n, m, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            [self[i, j] for j in range(self.cols) for i in range(self.rows)],
        )

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other[k, j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"IntMatrix({self.to_rows()!r})"

    def determinant(self) -> int:
        """Exact determinant (fraction-free would do; Fractions are simpler)."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        a = [[Fraction(self[i, j]) for j in range(n)] for i in range(n)]
        det = Fraction(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                return 0
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            det *= a[col][col]
            inv = 1 / a[col][col]
            for r in range(col + 1, n):
                f = a[r][col] * inv
                if f:
                    for c in range(col, n):
                        a[r][c] -= f * a[col][c]
        assert det.denominator == 1
        return int(det)


class FgAbGroup:
    """Finitely generated abelian group: free rank plus invariant factors.

    The invariant factors d1 | d2 | ... | dk are all >= 2; the divisibility
    chain is checked on construction.
    """

    __slots__ = ("free_rank", "torsion")

    def __init__(self, free_rank: int, torsion: Sequence[int] = ()):
        torsion = tuple(int(d) for d in torsion)
        if free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        if any(d < 2 for d in torsion):
            raise ValueError("invariant factors must be >= 2")
        for a, b in zip(torsion, torsion[1:]):
            if b % a != 0:
                raise ValueError(f"divisibility chain broken: {a} does not divide {b}")
        object.__setattr__(self, "free_rank", free_rank)
        object.__setattr__(self, "torsion", torsion)

    def __setattr__(self, name, value):
        raise AttributeError("FgAbGroup is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FgAbGroup)
            and self.free_rank == other.free_rank
            and self.torsion == other.torsion
        )

    def __hash__(self):
        return hash((self.free_rank, self.torsion))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " x ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FgAbGroup({self.free_rank}, {self.torsion})"


def _pivot_position(a, start, n, m):
    """Smallest nonzero absolute value, ties broken by row-major position."""
    best = None
    for i in range(start, n):
        for j in range(start, m):
            v = a[i][j]
            if v != 0:
                key = (abs(v), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
    return None if best is None else (best[1], best[2])


def smith_normal_form(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, S, V) with U*M*V = S, U and V unimodular, S in Smith form.

    S is diagonal with nonnegative entries d1 | d2 | ... Pivots are chosen
    deterministically (smallest nonzero absolute value, lowest position), so
    U and V are reproducible.
    """
    n, m = M.rows, M.cols
    a = M.to_rows()
    u = IntMatrix.identity(n).to_rows()
    v = IntMatrix.identity(m).to_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def addmul_row(dst, src, c):
        if c:
            a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
            u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst, src, c):
        if c:
            for r in a:
                r[dst] += c * r[src]
            for r in v:
                r[dst] += c * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while True:
        piv = _pivot_position(a, t, n, m)
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            # clear column t, then row t; a smaller remainder may reappear
            progress = False
            for i in range(t + 1, n):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    addmul_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        progress = True
            for j in range(t + 1, m):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        progress = True
            if not progress:
                break
        # divisibility: fold any entry not divisible by the pivot back in
        while True:
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, m):
                    if a[i][j] % a[t][t] != 0:
                        bad = (i, j)
                        break
                if bad:
                    break
            if bad is None:
                break
            bi, bj = bad
            addmul_row(t, bi, 1)
            while True:
                progress = False
                for j in range(t + 1, m):
                    if a[t][j]:
                        q = a[t][j] // a[t][t]
                        addmul_col(j, t, -q)
                        if a[t][j]:
                            swap_cols(t, j)
                            progress = True
                for i in range(t + 1, n):
                    if a[i][t]:
                        q = a[i][t] // a[t][t]
                        addmul_row(i, t, -q)
                        if a[i][t]:
                            swap_rows(t, i)
                            progress = True
                if not progress:
                    break
        if a[t][t] < 0:
            negate_row(t)
        t += 1
        if t >= min(n, m):
            break

    U = IntMatrix.from_rows(u) if n else IntMatrix.zero(0, 0)
    V = IntMatrix.from_rows(v) if m else IntMatrix.zero(0, 0)
    S = IntMatrix.from_rows(a) if n else IntMatrix.zero(0, m)
    if n == 0:
        S = IntMatrix.zero(0, m)
    return U, S, V


def smith_diagonal(M: IntMatrix) -> Tuple[int, ...]:
    """The diagonal of the Smith form of M, including zeros, length min(n, m)."""
    _, S, _ = smith_normal_form(M)
    k = min(M.rows, M.cols)
    return tuple(S[i, i] for i in range(k))


def cokernel_group(M: IntMatrix) -> FgAbGroup:
    """Z^cols modulo the subgroup generated by the rows of M."""
    diag = smith_diagonal(M)
    rank = sum(1 for d in diag if d != 0)
    torsion = tuple(d for d in diag if d >= 2)
    return FgAbGroup(M.cols - rank, torsion)


def kernel_rank(M: IntMatrix) -> int:
    """Rank of the kernel of M acting on column vectors."""
    diag = smith_diagonal(M)
    rank = sum(1 for d in diag if d != 0)
    return M.cols - rank


def solution_group_mod(M: IntMatrix, n: int) -> FgAbGroup:
    """Structure of {x in (Z/n)^cols : M x = 0 mod n} as an abelian group."""
    if n < 2:
        raise ValueError("modulus must be >= 2")
    diag = smith_diagonal(M)
    rank = sum(1 for d in diag if d != 0)
    factors = sorted(
        [gcd(d, n) for d in diag if d != 0 and gcd(d, n) >= 2]
        + [n] * (M.cols - rank)
    )
    # gcd factors with n appended always satisfy the chain after sorting only
    # when each divides the next; they do here because every factor divides n
    chain = []
    for d in factors:
        chain.append(d)
    for a, b in zip(chain, chain[1:]):
        if b % a:
            raise AssertionError("mod-n solution factors broke divisibility")
    return FgAbGroup(0, tuple(chain))


def lattice_member(vecs: Sequence[Sequence[int]], target: Sequence[int]) -> bool:
    """Is target in the sublattice of Z^d generated by vecs?"""
    d = len(target)
    if not vecs:
        return all(t == 0 for t in target)
    M = IntMatrix.from_rows(vecs)
    if M.cols != d:
        raise ValueError("ambient dimension mismatch")
    U, S, V = smith_normal_form(M)
    # rows of M span L; solve y * M = target, y integral <=> target in L.
    # With U M V = S: target in L iff z := target * V is solvable z = w * S.
    z = [sum(target[k] * V[k, j] for k in range(d)) for j in range(d)]
    r = min(M.rows, d)
    for j in range(d):
        dj = S[j, j] if j < r else 0
        if dj == 0:
            if z[j] != 0:
                return False
        elif z[j] % dj != 0:
            return False
    return True
