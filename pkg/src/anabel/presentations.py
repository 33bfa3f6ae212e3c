"""Finitely presented groups as generator symbols plus relator words.

Words are tuples of nonzero ints: k stands for generator k-1, -k for its
inverse. Simplification sticks to elementary Tietze moves under a step
budget; no attempt is made to decide isomorphism.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .intlin import FgAbGroup, IntMatrix, cokernel_group

Word = Tuple[int, ...]


def free_reduce(word: Sequence[int]) -> Word:
    out: List[int] = []
    for s in word:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def invert_word(word: Sequence[int]) -> Word:
    return tuple(-s for s in reversed(word))


def _cyclic_reduce(word: Word) -> Word:
    w = free_reduce(word)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def _relator_canon(word: Word) -> Word:
    """Least representative among cyclic rotations of the word and its inverse."""
    w = _cyclic_reduce(word)
    if not w:
        return w
    candidates = []
    for u in (w, invert_word(w)):
        for k in range(len(u)):
            candidates.append(u[k:] + u[:k])
    return min(candidates)


class GroupPresentation:
    """Generators with names, relator words over them."""

    def __init__(self, generators: Sequence[str], relators: Sequence[Sequence[int]]):
        self.generators = list(generators)
        n = len(self.generators)
        rels = []
        for r in relators:
            r = free_reduce(r)
            if any(s == 0 or abs(s) > n for s in r):
                raise ValueError(f"relator {r} references unknown generator")
            rels.append(r)
        self.relators = rels

    def __repr__(self):
        return f"GroupPresentation({self.generators!r}, {self.relators!r})"

    def describe(self) -> str:
        def show(word):
            if not word:
                return "1"
            parts = []
            for s in word:
                name = self.generators[abs(s) - 1]
                parts.append(name if s > 0 else name + "^-1")
            return "*".join(parts)

        gens = ", ".join(self.generators) if self.generators else "-"
        rels = "; ".join(show(r) for r in self.relators if r) or "-"
        return f"< {gens} | {rels} >"

    def rank(self) -> int:
        return len(self.generators)

    def is_free_presentation(self) -> bool:
        return all(not r for r in self.relators)

    def abelianization(self) -> FgAbGroup:
        n = len(self.generators)
        rows = []
        for r in self.relators:
            row = [0] * n
            for s in r:
                row[abs(s) - 1] += 1 if s > 0 else -1
            rows.append(row)
        M = IntMatrix(len(rows), n, [e for row in rows for e in row])
        return cokernel_group(M)

    def kill_generators(self, kill: Sequence[int]) -> "GroupPresentation":
        """Tietze: add relators g = 1 for the given generator indices (0-based),
        then eliminate those generators."""
        pres = GroupPresentation(
            self.generators, self.relators + [(k + 1,) for k in kill]
        )
        return pres.simplify()

    def simplify(self, budget: int = 10000) -> "GroupPresentation":
        """Elementary Tietze simplification under a step budget."""
        gens = list(self.generators)
        rels = [_cyclic_reduce(r) for r in self.relators]
        steps = 0
        changed = True
        while changed and steps < budget:
            changed = False
            rels = sorted(
                {_relator_canon(r) for r in rels if r}, key=lambda w: (len(w), w)
            )
            # eliminate a generator via a relator where it occurs exactly once
            elim = None
            for r in rels:
                counts: Dict[int, int] = {}
                for s in r:
                    counts[abs(s)] = counts.get(abs(s), 0) + 1
                for g, c in sorted(counts.items()):
                    if c == 1:
                        elim = (r, g)
                        break
                if elim:
                    break
            if elim is not None:
                r, g = elim
                i = next(k for k, s in enumerate(r) if abs(s) == g)
                # r = a g^e b  =>  g^e = a^-1 b^-1, so g = (a^-1 b^-1)^e
                a, e, b = r[:i], r[i], r[i + 1 :]
                repl = free_reduce(invert_word(a) + invert_word(b))
                if e < 0:
                    repl = invert_word(repl)
                new_rels = []
                for s in rels:
                    if s == r:
                        continue
                    out: List[int] = []
                    for t in s:
                        if abs(t) == g:
                            out.extend(repl if t > 0 else invert_word(repl))
                        else:
                            out.append(t)
                    new_rels.append(_cyclic_reduce(out))
                # renumber generators above g down by one
                def shift(word):
                    return tuple(
                        (t - 1 if t > g else t + 1 if t < -g else t) for t in word
                    )

                rels = [shift(w) for w in new_rels]
                del gens[g - 1]
                changed = True
                steps += 1
                continue
            steps += 1
        rels = sorted(
            {_relator_canon(r) for r in rels if r}, key=lambda w: (len(w), w)
        )
        return GroupPresentation(gens, rels)
