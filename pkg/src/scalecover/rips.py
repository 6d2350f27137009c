"""Rips 2-skeletons and the homotopy theory of chains at a fixed scale.

Only the 2-skeleton is ever built: homotopy of edge paths in a simplicial
complex is decided by its 2-skeleton.  Chains map to words over the non-tree
edges of a breadth-first spanning tree; two chains with common endpoints are
homotopic at the scale exactly when the combined word dies in the edge-path
group.  Word triviality is attacked in a fixed order (free reduction, integral
abelianization, bounded rewriting, coset enumeration) and the answer is a
certified Yes/No or an honest Unknown; nothing is ever guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import intlinalg as ila
from .coset import coset_enumeration
from .spaces import (
    Chain,
    EndpointMismatch,
    FilteredSpace,
    ScaleMismatch,
    SpaceError,
    chain_components,
    is_chain,
)

DEFAULT_COSET_ROWS = 100_000


class OutsideComponent(SpaceError):
    pass


class NotALoop(SpaceError):
    pass


# ---------------------------------------------------------------------------
# skeletons


@dataclass(frozen=True)
class Rips2Skeleton:
    scale: int
    vertices: tuple
    edges: tuple
    triangles: tuple


def rips_2_skeleton(space: FilteredSpace, k: int) -> Rips2Skeleton:
    """Edges are scale-k pairs, triangles the pairwise scale-k triples."""
    space.check_scale(k)
    edges = tuple(space.sorted_pairs(k))
    triangles = []
    for a, b in edges:
        ib = space.index(b)
        for c in space.points:
            if space.index(c) > ib and space.related(k, a, c) and space.related(k, b, c):
                triangles.append((a, b, c))
    triangles.sort(key=lambda t: tuple(space.index(p) for p in t))
    return Rips2Skeleton(k, space.points, edges, tuple(triangles))


# ---------------------------------------------------------------------------
# words


def free_reduce(word) -> tuple:
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word) -> tuple:
    return tuple(-letter for letter in reversed(word))


def _cyclic_reduce(word):
    word = list(free_reduce(word))
    while len(word) >= 2 and word[0] == -word[-1]:
        word = word[1:-1]
    return tuple(word)


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class GroupPresentation:
    """Edge-path presentation of the scale-k loop classes at a basepoint.

    Generators are the non-tree edges of the basepoint's component, oriented
    from the smaller point; relators read each triangle boundary through the
    tree collapse.  Words are relative to this specific tree and are not
    canonical across different trees.
    """

    space: FilteredSpace
    scale: int
    basepoint: object
    component: tuple
    tree_edges: tuple
    generators: tuple
    relators: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "_gen_index", {e: i + 1 for i, e in enumerate(self.generators)}
        )
        object.__setattr__(self, "_tree", frozenset(self.tree_edges))
        object.__setattr__(self, "_members", frozenset(self.component))

    def edge_letter(self, a, b):
        """Signed generator for traversing a -> b; None for tree or diagonal."""
        if a == b:
            return None
        pair = self.space.pair(a, b)
        if pair in self._tree:
            return None
        g = self._gen_index.get(pair)
        if g is None:
            raise SpaceError(f"{(a, b)!r} is not an edge at scale {self.scale}")
        return g if pair == (a, b) else -g


@lru_cache(maxsize=None)
def presentation_at_scale(space: FilteredSpace, k: int, basepoint) -> GroupPresentation:
    space.check_scale(k)
    space.index(basepoint)
    component = chain_components(space, k).block_of(basepoint)
    members = set(component)
    tree = set()
    seen = {basepoint}
    frontier = [basepoint]
    while frontier:
        nxt = []
        for p in frontier:
            for q in space.neighbors(k, p):
                if q not in seen:
                    seen.add(q)
                    tree.add(space.pair(p, q))
                    nxt.append(q)
        frontier = nxt
    generators = tuple(
        e for e in space.sorted_pairs(k) if e[0] in members and e not in tree
    )
    pres = GroupPresentation(
        space, k, basepoint, component, tuple(sorted(tree, key=lambda e: (space.index(e[0]), space.index(e[1])))),
        generators, (),
    )
    relators = []
    for a, b, c in rips_2_skeleton(space, k).triangles:
        if a not in members:
            continue
        word = []
        for u, v in ((a, b), (b, c), (c, a)):
            letter = pres.edge_letter(u, v)
            if letter is not None:
                word.append(letter)
        relators.append(free_reduce(word))
    return GroupPresentation(
        space, k, basepoint, component, pres.tree_edges, generators, tuple(relators)
    )


@dataclass(frozen=True)
class EdgeWord:
    """A reduced word of signed generator letters for a fixed presentation."""

    letters: tuple

    def __len__(self):
        return len(self.letters)


def chain_word(pres: GroupPresentation, chain) -> EdgeWord:
    """Word of a chain read against the presentation's spanning tree.

    For loops at the basepoint, equal words imply homotopic chains at the
    presentation's scale.
    """
    if isinstance(chain, Chain):
        if chain.scale != pres.scale:
            raise ScaleMismatch(f"chain at scale {chain.scale}, presentation at {pres.scale}")
        seq = chain.seq
    else:
        seq = tuple(chain)
    if not is_chain(pres.space, pres.scale, seq):
        raise SpaceError(f"not a chain at scale {pres.scale}: {seq!r}")
    for p in seq:
        if p not in pres._members:
            raise OutsideComponent(f"point {p!r} is outside the basepoint's component")
    word = []
    for a, b in zip(seq, seq[1:]):
        letter = pres.edge_letter(a, b)
        if letter is not None:
            word.append(letter)
    return EdgeWord(free_reduce(word))


# ---------------------------------------------------------------------------
# homology of the 2-skeleton


@dataclass(frozen=True)
class AbelianGroupInv:
    """A finitely generated abelian group by rank and invariant factors."""

    rank: int
    torsion: tuple

    def __post_init__(self):
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValueError("torsion coefficients must form a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion coefficients must be at least 2")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion


class ScaleHomology:
    """H1 of the scale-k Rips 2-skeleton with explicit integer coordinates.

    Built from a lattice basis B of the cycle space and the Smith form of the
    triangle boundaries expressed in that basis.  Coordinates list torsion
    positions first (reduced into [0, d)), then free positions.
    """

    def __init__(self, space, k, restrict=None):
        space.check_scale(k)
        skel = rips_2_skeleton(space, k)
        if restrict is None:
            keep = set(space.points)
        else:
            keep = set(restrict)
        self.space = space
        self.scale = k
        self.vertices = tuple(p for p in space.points if p in keep)
        self.edges = tuple(e for e in skel.edges if e[0] in keep and e[1] in keep)
        self.triangles = tuple(
            t for t in skel.triangles if all(p in keep for p in t)
        )
        vindex = {p: i for i, p in enumerate(self.vertices)}
        self._eindex = {e: i for i, e in enumerate(self.edges)}
        nv, ne, nt = len(self.vertices), len(self.edges), len(self.triangles)
        d1 = ila.zeros(nv, ne)
        for e, (a, b) in enumerate(self.edges):
            d1[vindex[a]][e] = -1
            d1[vindex[b]][e] = 1
        d2 = ila.zeros(ne, nt)
        for t, (a, b, c) in enumerate(self.triangles):
            d2[self._eindex[(a, b)]][t] += 1
            d2[self._eindex[(b, c)]][t] += 1
            d2[self._eindex[(a, c)]][t] -= 1
        self._d1 = d1
        self.basis, self._functional = ila.kernel_with_coords(d1)
        nullity = len(self.basis[0]) if self.basis else 0
        w = ila.zeros(nullity, nt)
        for t in range(nt):
            col = [d2[i][t] for i in range(ne)]
            sol = ila.matvec(self._functional, col) if ne else []
            for i in range(nullity):
                w[i][t] = sol[i]
        u, s, _ = ila.smith_normal_form(w)
        self._u = u
        self._diag = ila.diagonal_of(s)
        self._nullity = nullity
        nonzero = [d for d in self._diag if d]
        self._torsion_pos = [i for i, d in enumerate(self._diag) if d > 1]
        self._free_pos = list(range(len(nonzero), nullity))
        self.group = AbelianGroupInv(
            len(self._free_pos), tuple(self._diag[i] for i in self._torsion_pos)
        )

    def chain_vector(self, seq) -> list:
        """Signed edge-incidence vector of a closed chain."""
        vec = [0] * len(self.edges)
        for a, b in zip(seq, seq[1:]):
            if a == b:
                continue
            pair = self.space.pair(a, b)
            idx = self._eindex.get(pair)
            if idx is None:
                raise SpaceError(f"{(a, b)!r} is not an edge at scale {self.scale}")
            vec[idx] += 1 if pair == (a, b) else -1
        return vec

    def coords(self, cycle_vec) -> tuple:
        """Class of an integer cycle in the Smith basis."""
        if not self.edges:
            return ()
        vec = list(cycle_vec)
        if any(ila.matvec(self._d1, vec)):
            raise SpaceError("vector is not a cycle")
        if self._nullity == 0:
            return ()
        a = ila.matvec(self._functional, vec)
        y = ila.matvec(self._u, a)
        out = [y[i] % self._diag[i] for i in self._torsion_pos]
        out.extend(y[i] for i in self._free_pos)
        return tuple(out)

    def representative_cycles(self) -> list:
        """One cycle per coordinate of the group, as edge vectors."""
        if self._nullity == 0:
            return []
        uinv = ila.unimodular_inverse(self._u)
        reps = []
        for pos in self._torsion_pos + self._free_pos:
            a = [uinv[i][pos] for i in range(self._nullity)]
            reps.append(ila.matvec(self.basis, a))
        return reps


@lru_cache(maxsize=None)
def _homology(space: FilteredSpace, k: int, basepoint) -> ScaleHomology:
    restrict = None
    if basepoint is not None:
        restrict = chain_components(space, k).block_of(basepoint)
    return ScaleHomology(space, k, restrict)


def h1_at_scale(space: FilteredSpace, k: int, basepoint=None) -> AbelianGroupInv:
    """H1 of the scale-k 2-skeleton; restricted to a component if given."""
    return _homology(space, k, basepoint).group


def h1_class(space: FilteredSpace, k: int, seq) -> tuple:
    """Image of a loop in H1 coordinates; zero is necessary for nulhomotopy."""
    if isinstance(seq, Chain):
        if seq.scale != k:
            raise ScaleMismatch(f"chain at scale {seq.scale}, asked at {k}")
        seq = seq.seq
    seq = tuple(seq)
    if not is_chain(space, k, seq):
        raise SpaceError(f"not a chain at scale {k}: {seq!r}")
    if seq[0] != seq[-1]:
        raise NotALoop(f"chain from {seq[0]!r} to {seq[-1]!r} is not a loop")
    hom = _homology(space, k, None)
    return hom.coords(hom.chain_vector(seq))


def presentation_h1(pres: GroupPresentation) -> AbelianGroupInv:
    """Abelianization of the presented group, for cross-checking h1_at_scale."""
    _, diag = _pres_abelian(pres)
    ngens = len(pres.generators)
    nonzero = [d for d in diag if d]
    return AbelianGroupInv(ngens - len(nonzero), tuple(d for d in nonzero if d > 1))


def _exponent_vector(pres, word):
    vec = [0] * len(pres.generators)
    for letter in word:
        vec[abs(letter) - 1] += 1 if letter > 0 else -1
    return vec


@lru_cache(maxsize=None)
def _pres_abelian(pres: GroupPresentation):
    ngens = len(pres.generators)
    r = ila.zeros(ngens, len(pres.relators))
    for j, rel in enumerate(pres.relators):
        for letter in rel:
            r[abs(letter) - 1][j] += 1 if letter > 0 else -1
    u, s, _ = ila.smith_normal_form(r)
    return (tuple(map(tuple, u)), tuple(ila.diagonal_of(s)))


def _abelian_coords(pres, word):
    u, diag = _pres_abelian(pres)
    y = ila.matvec([list(row) for row in u], _exponent_vector(pres, word))
    out = []
    for i, val in enumerate(y):
        d = diag[i] if i < len(diag) else 0
        if d == 1:
            continue
        out.append(val % d if d else val)
    return tuple(out)


# ---------------------------------------------------------------------------
# chain reduction


def reduce_chain(space: FilteredSpace, k: int, chain) -> Chain:
    """Greedy homotopy reduction: drop interior points spanned at scale k.

    Each deletion is a homotopy across a triangle or a backtrack, so the
    result is homotopic to the input at scale k and never longer; on return
    no interior point is removable.
    """
    if isinstance(chain, Chain):
        if chain.scale != k:
            raise ScaleMismatch(f"chain at scale {chain.scale}, asked at {k}")
        seq = list(chain.seq)
    else:
        seq = list(chain)
    if not is_chain(space, k, seq):
        raise SpaceError(f"not a chain at scale {k}: {tuple(seq)!r}")
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(seq):
            if seq[i] == seq[i + 1]:
                del seq[i + 1]
                changed = True
            else:
                i += 1
        for i in range(1, len(seq) - 1):
            if space.related(k, seq[i - 1], seq[i + 1]):
                del seq[i]
                changed = True
                break
    return Chain(k, tuple(seq))


# ---------------------------------------------------------------------------
# word triviality machinery


def _rotations(word):
    return [word[i:] + word[:i] for i in range(len(word))]


@lru_cache(maxsize=None)
def _simplified(pres: GroupPresentation):
    """Tietze-style simplification: returns (substitution, relators, rules).

    The substitution rewrites original letters into words over the surviving
    generators; rules are length-decreasing replacements harvested from the
    simplified relators.  Both preserve the group element of any word.
    """
    subst = {g: (g,) for g in range(1, len(pres.generators) + 1)}
    rels = sorted(
        {r for r in (_cyclic_reduce(rel) for rel in pres.relators) if r},
        key=lambda r: (len(r), r),
    )

    def substitute(word, g, replacement):
        out = []
        for lt in word:
            if abs(lt) == g:
                out.extend(replacement if lt > 0 else invert_word(replacement))
            else:
                out.append(lt)
        return free_reduce(out)

    while sum(len(r) for r in rels) < 10_000:
        candidate = None
        for rel in rels:
            counts = {}
            for letter in rel:
                counts[abs(letter)] = counts.get(abs(letter), 0) + 1
            for pos, letter in enumerate(rel):
                if counts[abs(letter)] == 1:
                    candidate = (rel, pos, letter)
                    break
            if candidate:
                break
        if not candidate:
            break
        rel, pos, letter = candidate
        rotated = rel[pos:] + rel[:pos]
        rest = rotated[1:]
        g = abs(letter)
        replacement = invert_word(rest) if letter > 0 else rest
        subst = {key: substitute(word, g, replacement) for key, word in subst.items()}
        new_rels = set()
        for r in rels:
            reduced = _cyclic_reduce(substitute(r, g, replacement))
            if reduced:
                new_rels.add(reduced)
        rels = sorted(new_rels, key=lambda r: (len(r), r))

    rules = {}
    for rel in rels:
        for base in (rel, invert_word(rel)):
            for rot in _rotations(base):
                half = len(rot) // 2 + 1
                for cut in range(half, len(rot) + 1):
                    head, tail = rot[:cut], rot[cut:]
                    if len(head) <= len(tail):
                        continue
                    rep = invert_word(tail)
                    old = rules.get(head)
                    if old is None or (len(rep), rep) < (len(old), old):
                        rules[head] = rep
    ordered = sorted(rules.items(), key=lambda kv: (-len(kv[0]), kv[0]))
    return (subst, tuple(rels), tuple(ordered))


def _rewrite(word, rules, max_steps=10_000):
    word = free_reduce(word)
    steps = 0
    changed = True
    while changed and steps < max_steps:
        changed = False
        for head, rep in rules:
            n = len(head)
            if n > len(word):
                continue
            for i in range(len(word) - n + 1):
                if word[i : i + n] == head:
                    word = free_reduce(word[:i] + rep + word[i + n :])
                    changed = True
                    steps += 1
                    break
            if changed:
                break
    return word


@lru_cache(maxsize=None)
def _coset_table(pres: GroupPresentation, budget: int):
    _, rels, _ = _simplified(pres)
    live = sorted({abs(l) for r in rels for l in r})
    renumber = {g: i + 1 for i, g in enumerate(live)}
    packed = tuple(
        tuple((renumber[abs(l)]) * (1 if l > 0 else -1) for l in r) for r in rels
    )
    table = coset_enumeration(len(live), packed, budget)
    return (renumber, table) if table is not None else None


@dataclass(frozen=True)
class HomotopyDecision:
    verdict: str  # "yes" | "no" | "unknown"
    method: str
    witness: dict | None = None

    @property
    def is_yes(self):
        return self.verdict == "yes"

    @property
    def is_no(self):
        return self.verdict == "no"

    @property
    def is_unknown(self):
        return self.verdict == "unknown"


def _word_trivial(pres, word, coset_budget) -> HomotopyDecision:
    word = free_reduce(word)
    if not word:
        return HomotopyDecision("yes", "free_reduction")
    if not pres.relators:
        return HomotopyDecision(
            "no", "free_group", {"reduced_word": list(word)}
        )
    coords = _abelian_coords(pres, word)
    if any(coords):
        return HomotopyDecision(
            "no", "h1_separation", {"h1_class_difference": list(coords)}
        )
    subst, rels, rules = _simplified(pres)
    expanded = []
    for letter in word:
        target = subst[abs(letter)]
        expanded.extend(target if letter > 0 else invert_word(target))
    rewritten = _rewrite(tuple(expanded), rules)
    if not rewritten:
        return HomotopyDecision("yes", "relator_rewriting")
    if not rels:
        return HomotopyDecision(
            "no", "free_group", {"reduced_word": list(rewritten)}
        )
    relator_gens = {abs(l) for r in rels for l in r}
    free_part = free_reduce([l for l in rewritten if abs(l) not in relator_gens])
    if free_part:
        # generators outside every relator split off as a free factor
        return HomotopyDecision(
            "no", "free_factor", {"reduced_word": list(free_part)}
        )
    bound_part = free_reduce([l for l in rewritten if abs(l) in relator_gens])
    packed = _coset_table(pres, coset_budget)
    if packed is not None:
        renumber, table = packed
        traced = tuple(renumber[abs(l)] * (1 if l > 0 else -1) for l in bound_part)
        target = table.trace(traced)
        if target != 0:
            return HomotopyDecision(
                "no",
                "coset_enumeration",
                {"coset": target, "group_order": table.order},
            )
        if bound_part == rewritten:
            return HomotopyDecision("yes", "coset_enumeration")
        return HomotopyDecision(
            "unknown",
            "mixed_free_product",
            {"reduced_word": list(rewritten)},
        )
    return HomotopyDecision(
        "unknown", "budget", {"exhausted": "coset_rows", "budget": coset_budget}
    )


def decide_e_homotopic(space: FilteredSpace, k: int, c, d,
                       coset_budget: int = DEFAULT_COSET_ROWS) -> HomotopyDecision:
    """Certified three-valued test for scale-k homotopy relative endpoints.

    The chains must share both endpoints.  Yes and No answers are exact; an
    Unknown names the exhausted budget.
    """
    cseq = tuple(c.seq) if isinstance(c, Chain) else tuple(c)
    dseq = tuple(d.seq) if isinstance(d, Chain) else tuple(d)
    for obj in (c, d):
        if isinstance(obj, Chain) and obj.scale != k:
            raise ScaleMismatch(f"chain at scale {obj.scale}, asked at {k}")
    for seq in (cseq, dseq):
        if not is_chain(space, k, seq):
            raise SpaceError(f"not a chain at scale {k}: {seq!r}")
    if cseq[0] != dseq[0] or cseq[-1] != dseq[-1]:
        raise EndpointMismatch(
            f"chains run {cseq[0]!r}->{cseq[-1]!r} and {dseq[0]!r}->{dseq[-1]!r}"
        )
    pres = presentation_at_scale(space, k, cseq[0])
    word = free_reduce(
        chain_word(pres, Chain(k, cseq)).letters
        + invert_word(chain_word(pres, Chain(k, dseq)).letters)
    )
    return _word_trivial(pres, word, coset_budget)
