"""Fine monoids embedded in integer lattices, their faces and morphism tests.

A monoid is stored as the N-span of finitely many lattice vectors, so
integrality is automatic and membership, faces, units and saturation all
reduce to exact rational cone geometry plus bounded lattice searches.
Divisibility is written additively: a | b iff b - a lies in the monoid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .intlin import FgAbGroup, IntMatrix, lattice_member, smith_normal_form

Vec = Tuple[int, ...]

# ---------------------------------------------------------------------------
# exact linear feasibility (Fourier-Motzkin with witness extraction)
# ---------------------------------------------------------------------------


def _fm_solve(ineqs, nvars):
    """Feasible point of {x : coeffs . x >= rhs for all (coeffs, rhs)} or None."""
    if nvars == 0:
        for _, rhs in ineqs:
            if rhs > 0:
                return None
        return []
    last = nvars - 1
    pos, neg, rest = [], [], []
    for coeffs, rhs in ineqs:
        c = coeffs[last]
        if c > 0:
            pos.append((coeffs, rhs))
        elif c < 0:
            neg.append((coeffs, rhs))
        else:
            rest.append((coeffs[:last], rhs))
    projected = list(rest)
    for pc, pr in pos:
        for nc, nr in neg:
            a, b = pc[last], -nc[last]
            coeffs = tuple(b * pc[j] + a * nc[j] for j in range(last))
            projected.append((coeffs, b * pr + a * nr))
    sol = _fm_solve(projected, last)
    if sol is None:
        return None
    lo, hi = None, None
    for coeffs, rhs in pos:
        bound = (rhs - sum(c * s for c, s in zip(coeffs[:last], sol))) / coeffs[last]
        lo = bound if lo is None or bound > lo else lo
    for coeffs, rhs in neg:
        bound = (rhs - sum(c * s for c, s in zip(coeffs[:last], sol))) / coeffs[last]
        hi = bound if hi is None or bound < hi else hi
    if lo is not None:
        x = lo
    elif hi is not None:
        x = min(hi, Fraction(0))
    else:
        x = Fraction(0)
    return sol + [x]


def _solve_eq_ineq(equalities, inequalities, nvars):
    """Feasible point of {A x = a, B x >= b} over Q, or None.

    equalities/inequalities are (coeffs, rhs) pairs with Fraction entries.
    """
    eqs = [([Fraction(c) for c in coeffs], Fraction(rhs)) for coeffs, rhs in equalities]
    ins = [([Fraction(c) for c in coeffs], Fraction(rhs)) for coeffs, rhs in inequalities]
    subs: Dict[int, Tuple[List[Fraction], Fraction]] = {}
    free = list(range(nvars))
    # Gaussian elimination on the equalities
    for coeffs, rhs in eqs:
        coeffs = coeffs[:]
        for v, (expr, cst) in subs.items():
            c = coeffs[v]
            if c:
                coeffs[v] = Fraction(0)
                for j in range(nvars):
                    coeffs[j] += c * expr[j]
                rhs -= c * cst
        piv = next((j for j in free if coeffs[j] != 0), None)
        if piv is None:
            if rhs != 0:
                return None
            continue
        c = coeffs[piv]
        expr = [-coeffs[j] / c if j != piv else Fraction(0) for j in range(nvars)]
        cst = rhs / c
        for v, (e2, c2) in list(subs.items()):
            k = e2[piv]
            if k:
                e2[piv] = Fraction(0)
                for j in range(nvars):
                    e2[j] += k * expr[j]
                subs[v] = (e2, c2 + k * cst)
        subs[piv] = (expr, cst)
        free.remove(piv)
    # rewrite the inequalities over the free variables
    findex = {v: i for i, v in enumerate(free)}
    reduced = []
    for coeffs, rhs in ins:
        coeffs = coeffs[:]
        for v, (expr, cst) in subs.items():
            c = coeffs[v]
            if c:
                coeffs[v] = Fraction(0)
                for j in range(nvars):
                    coeffs[j] += c * expr[j]
                rhs -= c * cst
        reduced.append((tuple(coeffs[v] for v in free), rhs))
    sol = _fm_solve(reduced, len(free))
    if sol is None:
        return None
    out = [Fraction(0)] * nvars
    for v in free:
        out[v] = sol[findex[v]]
    changed = True
    while changed:
        changed = False
        for v, (expr, cst) in subs.items():
            val = cst + sum(expr[j] * out[j] for j in range(nvars))
            if out[v] != val:
                out[v] = val
                changed = True
    return out


def cone_member(v: Sequence[int], gens: Sequence[Vec]) -> bool:
    """Is v in the rational cone spanned by gens?"""
    d = len(v)
    k = len(gens)
    if k == 0:
        return all(x == 0 for x in v)
    eqs = [([Fraction(g[j]) for g in gens], Fraction(v[j])) for j in range(d)]
    ins = [(tuple(Fraction(1) if i == t else Fraction(0) for i in range(k)), Fraction(0))
           for t in range(k)]
    return _solve_eq_ineq(eqs, ins, k) is not None


def _positive_functional(gens: Sequence[Vec], unit_idx: Set[int], dim: int):
    """phi in Q^dim with phi.g = 0 on unit generators and phi.g >= 1 elsewhere."""
    eqs = [([Fraction(c) for c in gens[i]], Fraction(0)) for i in sorted(unit_idx)]
    ins = [
        (tuple(Fraction(c) for c in gens[i]), Fraction(1))
        for i in range(len(gens))
        if i not in unit_idx
    ]
    return _solve_eq_ineq(eqs, ins, dim)


# ---------------------------------------------------------------------------
# affine monoids
# ---------------------------------------------------------------------------


class AffineMonoid:
    """N-span of a finite set of vectors in Z^d."""

    def __init__(self, ambient_dim: int, generators: Sequence[Sequence[int]]):
        self.dim = int(ambient_dim)
        gens = []
        for g in generators:
            g = tuple(int(c) for c in g)
            if len(g) != self.dim:
                raise ValueError(f"generator {g} not in Z^{self.dim}")
            gens.append(g)
        self.gens: Tuple[Vec, ...] = tuple(gens)
        self._unit_idx: Optional[Set[int]] = None
        self._phi: Optional[List[Fraction]] = None

    def __repr__(self):
        return f"AffineMonoid({self.dim}, {list(self.gens)!r})"

    def __eq__(self, other):
        return (
            isinstance(other, AffineMonoid)
            and self.dim == other.dim
            and sorted(self.gens) == sorted(other.gens)
        )

    def __hash__(self):
        return hash((self.dim, tuple(sorted(self.gens))))

    @classmethod
    def free(cls, d: int) -> "AffineMonoid":
        return cls(d, [tuple(1 if i == j else 0 for j in range(d)) for i in range(d)])

    # -- cone structure ----------------------------------------------------

    def cone_contains(self, x: Sequence[int]) -> bool:
        return cone_member(tuple(x), self.gens)

    def unit_generator_indices(self) -> Set[int]:
        """Indices of generators lying in the lineality space of the cone."""
        if self._unit_idx is None:
            self._unit_idx = {
                i
                for i, g in enumerate(self.gens)
                if cone_member(tuple(-c for c in g), self.gens)
            }
        return self._unit_idx

    def _grading(self) -> List[Fraction]:
        """A functional vanishing on units and >= 1 on the other generators."""
        if self._phi is None:
            phi = _positive_functional(
                self.gens, self.unit_generator_indices(), self.dim
            )
            if phi is None:
                raise AssertionError("pointed part of the cone admits no grading")
            self._phi = phi
        return self._phi

    # -- membership --------------------------------------------------------

    def contains(self, x: Sequence[int]) -> bool:
        """Exact membership: is x an N-combination of the generators?"""
        x = tuple(int(c) for c in x)
        if len(x) != self.dim:
            raise ValueError("ambient dimension mismatch")
        if all(c == 0 for c in x):
            return True
        if not self.cone_contains(x):
            return False
        units = self.unit_generator_indices()
        ugens = [self.gens[i] for i in sorted(units)]
        others = [self.gens[i] for i in range(len(self.gens)) if i not in units]
        phi = self._grading()

        def phival(v):
            return sum(p * c for p, c in zip(phi, v))

        target = phival(x)
        if target < 0:
            return False

        def search(idx: int, residual: Vec, budget: Fraction) -> bool:
            if budget == 0:
                return lattice_member(ugens, residual)
            if idx == len(others):
                return False
            g = others[idx]
            w = phival(g)
            cmax = int(budget / w)
            for c in range(cmax + 1):
                r = tuple(residual[j] - c * g[j] for j in range(self.dim))
                if search(idx + 1, r, budget - c * w):
                    return True
            return False

        return search(0, x, target)

    def membership(self, x: Sequence[int]) -> bool:
        return self.contains(x)

    # -- element enumeration ------------------------------------------------

    def elements_up_to_degree(self, bound: int) -> List[Vec]:
        """All distinct sums of at most `bound` generators, sorted."""
        frontier = {tuple([0] * self.dim)}
        seen = set(frontier)
        for _ in range(bound):
            nxt = set()
            for x in frontier:
                for g in self.gens:
                    y = tuple(a + b for a, b in zip(x, g))
                    if y not in seen:
                        nxt.add(y)
            seen |= nxt
            frontier = nxt
            if not frontier:
                break
        return sorted(seen)

    # -- faces ---------------------------------------------------------------

    def faces(self) -> List["Face"]:
        """All faces, as generator-index subsets, ordered by inclusion-size."""
        k = len(self.gens)
        out = []
        for mask in range(1 << k):
            T = {i for i in range(k) if mask >> i & 1}
            if len(T) == k:
                out.append(Face(self, frozenset(T)))
                continue
            eqs = [([Fraction(c) for c in self.gens[i]], Fraction(0)) for i in sorted(T)]
            ins = [
                (tuple(Fraction(c) for c in self.gens[i]), Fraction(1))
                for i in range(k)
                if i not in T
            ]
            if _solve_eq_ineq(eqs, ins, self.dim) is not None:
                out.append(Face(self, frozenset(T)))
        out.sort(key=lambda f: (len(f.indices), tuple(sorted(f.indices))))
        return out

    # -- saturation -----------------------------------------------------------

    def _zonotope_points(self):
        lo = [sum(min(g[j], 0) for g in self.gens) for j in range(self.dim)]
        hi = [sum(max(g[j], 0) for g in self.gens) for j in range(self.dim)]
        ranges = [range(lo[j], hi[j] + 1) for j in range(self.dim)]
        return itertools.product(*ranges)

    def is_saturated(self) -> Tuple[bool, Optional[Vec]]:
        """Check P = P^gp cap cone(P); a witness is in the saturation, not P.

        Every element of the saturation is a P-element plus a lattice point of
        the generator zonotope, so scanning the zonotope is a complete test.
        """
        for x in self._zonotope_points():
            x = tuple(x)
            if not self.cone_contains(x):
                continue
            if not lattice_member(self.gens, x):
                continue
            if not self.contains(x):
                return False, x
        return True, None

    def saturation(self) -> "AffineMonoid":
        extra = []
        for x in self._zonotope_points():
            x = tuple(x)
            if any(x):
                if self.cone_contains(x) and lattice_member(self.gens, x):
                    extra.append(x)
        return AffineMonoid(self.dim, list(self.gens) + extra)

    # -- sharp decomposition ----------------------------------------------------

    def sharp_quotient(self) -> Tuple[FgAbGroup, "AffineMonoid"]:
        """Split P as units x sharp; requires P saturated.

        Returns the unit group P^* as an FgAbGroup and the sharp monoid
        P/P^* embedded in the quotient lattice.
        """
        ok, _ = self.is_saturated()
        if not ok:
            raise ValueError("sharp decomposition requires a saturated monoid")
        units = sorted(self.unit_generator_indices())
        ugens = [self.gens[i] for i in units]
        if not ugens:
            return FgAbGroup(0), AffineMonoid(self.dim, self.gens)
        U = IntMatrix.from_rows(ugens)
        _, S, V = smith_normal_form(U)
        r = sum(1 for i in range(min(S.rows, S.cols)) if S[i, i] != 0)
        # columns of V beyond position r give coordinates of Z^d/(unit lattice):
        # in the basis V^-1 the unit lattice is spanned by multiples of the
        # first r coordinates, so projecting to the last d-r works
        Vinv = _int_inverse(V)
        proj_rows = [Vinv.row(i) for i in range(r, self.dim)]

        def project(x: Vec) -> Vec:
            return tuple(sum(row[j] * x[j] for j in range(self.dim)) for row in proj_rows)

        sharp = AffineMonoid(self.dim - r, [project(g) for g in self.gens])
        if sharp.unit_generator_indices() != {
            i for i, g in enumerate(sharp.gens) if not any(g)
        }:
            raise AssertionError("sharp quotient kept nontrivial units")
        return FgAbGroup(r), sharp

    def gp_rank(self) -> int:
        if not self.gens:
            return 0
        M = IntMatrix.from_rows(self.gens)
        _, S, _ = smith_normal_form(M)
        return sum(1 for i in range(min(S.rows, S.cols)) if S[i, i] != 0)


def _int_inverse(M: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular integer matrix."""
    n = M.rows
    det = M.determinant()
    if abs(det) != 1:
        raise ValueError("matrix is not unimodular")
    a = [[Fraction(M[i, j]) for j in range(n)] + [Fraction(1 if k == i else 0) for k in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = [[a[i][n + j] for j in range(n)] for i in range(n)]
    if any(x.denominator != 1 for row in out for x in row):
        raise AssertionError("inverse of unimodular matrix must be integral")
    return IntMatrix.from_rows([[int(x) for x in row] for row in out])


@dataclass(frozen=True)
class Face:
    """A face of an affine monoid, as the set of generator indices it spans."""

    monoid: AffineMonoid
    indices: frozenset

    def generators(self) -> List[Vec]:
        return [self.monoid.gens[i] for i in sorted(self.indices)]

    def as_monoid(self) -> AffineMonoid:
        return AffineMonoid(self.monoid.dim, self.generators())

    def contains(self, x: Sequence[int]) -> bool:
        return self.as_monoid().contains(x)

    def __le__(self, other: "Face") -> bool:
        return self.indices <= other.indices

    def __repr__(self):
        return f"Face({sorted(self.indices)})"


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


class MonoidMorphism:
    """Lattice map sending each source generator into the target monoid."""

    def __init__(self, source: AffineMonoid, target: AffineMonoid,
                 matrix: Sequence[Sequence[int]]):
        self.source = source
        self.target = target
        rows = [tuple(int(c) for c in row) for row in matrix]
        if len(rows) != target.dim or any(len(r) != source.dim for r in rows):
            raise ValueError("matrix shape must be target.dim x source.dim")
        self.matrix = tuple(rows)
        for g in source.gens:
            if not target.contains(self.apply(g)):
                raise ValueError(
                    f"morphism does not map generator {g} into the target monoid"
                )

    @classmethod
    def unchecked(cls, source, target, matrix):
        obj = cls.__new__(cls)
        obj.source = source
        obj.target = target
        obj.matrix = tuple(tuple(int(c) for c in row) for row in matrix)
        return obj

    def apply(self, x: Sequence[int]) -> Vec:
        return tuple(sum(r[j] * x[j] for j in range(self.source.dim)) for r in self.matrix)

    def image_monoid(self) -> AffineMonoid:
        return AffineMonoid(self.target.dim, [self.apply(g) for g in self.source.gens])

    def injective_on_gp(self) -> bool:
        gens = self.source.gens
        if not gens:
            return True
        src = IntMatrix.from_rows(gens)
        img = IntMatrix.from_rows([self.apply(g) for g in gens])
        return _rank(src) == _rank(img)

    def restrict_to_face(self, face: Face) -> "MonoidMorphism":
        """The induced morphism phi^-1(F') -> F' for a face F' of the target."""
        if face.monoid is not self.target and face.monoid != self.target:
            raise ValueError("face does not belong to the target monoid")
        F = face.as_monoid()
        pre_gens = [g for g in self.source.gens if F.contains(self.apply(g))]
        src = AffineMonoid(self.source.dim, pre_gens)
        return MonoidMorphism(src, F, self.matrix)


def _rank(M: IntMatrix) -> int:
    _, S, _ = smith_normal_form(M)
    return sum(1 for i in range(min(S.rows, S.cols)) if S[i, i] != 0)


def _l_integers(primes: Sequence[int], bound: int) -> List[int]:
    out = [1]
    for p in sorted(set(primes)):
        new = []
        for n in out:
            m = n * p
            while m <= bound:
                new.append(m)
                m *= p
        out.extend(new)
    return sorted(n for n in out if n <= bound)


def is_kummer(phi: MonoidMorphism, primes: Sequence[int],
              multiplier_bound: int = 60) -> Tuple[bool, Optional[Vec]]:
    """L-Kummer test: injective on gp and every target generator has an
    L-integer multiple in the image. The multiplier search is bounded."""
    if not phi.injective_on_gp():
        return False, None
    image = phi.image_monoid()
    mults = _l_integers(primes, multiplier_bound)
    for t in phi.target.gens:
        if not any(image.contains(tuple(n * c for c in t)) for n in mults):
            return False, t
    return True, None


@dataclass(frozen=True)
class Counterexample:
    """Violating tuple returned by the bounded morphism checkers."""

    data: tuple

    def __bool__(self):
        return False


PASS = None  # sentinel: checkers return None on Pass, a Counterexample otherwise


def check_integral_bounded(phi: MonoidMorphism, bound: int):
    """Bounded integrality test.

    Scans quadruples (f1', f2', f1, f2) of degree <= bound with
    f1' + phi(f1) = f2' + phi(f2) and looks for g', g1, g2 with
    f1' = g' + phi(g1) and f2' = g' + phi(g2); g1 ranges over degree
    <= 2*bound, the remaining memberships are decided exactly.
    Returns None on Pass, else the lexicographically least counterexample.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    src = phi.source.elements_up_to_degree(bound)
    tgt = phi.target.elements_up_to_degree(bound)
    src_wide = phi.source.elements_up_to_degree(2 * bound)
    image = phi.image_monoid()
    buckets: Dict[Vec, List[Tuple[Vec, Vec]]] = {}
    for fp in tgt:
        for f in src:
            key = tuple(a + b for a, b in zip(fp, phi.apply(f)))
            buckets.setdefault(key, []).append((fp, f))
    bad = None
    for key in sorted(buckets):
        pairs = buckets[key]
        for (f1p, f1) in pairs:
            for (f2p, f2) in pairs:
                quad = (f1p, f2p, f1, f2)
                if bad is not None and quad >= bad:
                    continue
                ok = False
                for g1 in src_wide:
                    gp = tuple(a - b for a, b in zip(f1p, phi.apply(g1)))
                    if not phi.target.contains(gp):
                        continue
                    rem = tuple(a - b for a, b in zip(f2p, gp))
                    if image.contains(rem):
                        ok = True
                        break
                if not ok:
                    bad = quad
    return None if bad is None else Counterexample(bad)


def check_saturated_bounded(phi: MonoidMorphism, primes: Sequence[int], bound: int):
    """Bounded version of the prime-divisibility saturation test.

    For a, b of degree <= bound and p in primes with phi(a) | p*b, some
    c with a | p*c and phi(c) | b must exist; c is searched up to degree
    2*bound. Returns None on Pass, else Counterexample((a, b, p)).
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    src = phi.source.elements_up_to_degree(bound)
    tgt = phi.target.elements_up_to_degree(bound)
    cand = phi.source.elements_up_to_degree(2 * bound)
    for a in src:
        fa = phi.apply(a)
        for b in tgt:
            for p in sorted(set(primes)):
                pb = tuple(p * x for x in b)
                if not phi.target.contains(tuple(x - y for x, y in zip(pb, fa))):
                    continue
                found = False
                for c in cand:
                    pc = tuple(p * x for x in c)
                    if not phi.source.contains(tuple(x - y for x, y in zip(pc, a))):
                        continue
                    fc = phi.apply(c)
                    if phi.target.contains(tuple(x - y for x, y in zip(b, fc))):
                        found = True
                        break
                if not found:
                    return Counterexample((a, b, p))
    return None
