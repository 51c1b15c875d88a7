"""Categories equipped with a class of split embeddings and their derived data.

An MRStructure is a finite category together with a subcategory of
"embeddings" (m_class), each embedding m carrying a chosen retraction
star(m) with star(m) o m = id, contravariantly functorial in m.  From this
the module derives:

  r_class  morphisms admitting no factorization through a non-invertible
           embedding on the left, nor through the retraction of one on the
           right (the "irreducible" maps);
  s_class  composites r o star(m) with r in r_class, m in m_class;
  k_class  composites m o star(n) of an embedding after a retraction;
  i_class  the isomorphisms;

plus subobject posets, the unique-up-to-iso three-part factorization
n o r o star(m) of every morphism, the zero-completed category on r_class,
and machine checks of all the structural axioms the transport theory needs.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass

from .fincat import FinCat, ValidationReport


class StructureError(Exception):
    pass


class NoFactorizationError(StructureError):
    def __init__(self, f, message=None):
        super().__init__(message or f"morphism {f} admits no factorization")
        self.morphism = f


class AmbiguousFactorizationError(StructureError):
    def __init__(self, f, triple_a, triple_b):
        super().__init__(
            f"morphism {f} has non-conjugate factorizations {triple_a} and {triple_b}"
        )
        self.morphism = f
        self.triples = (triple_a, triple_b)


@dataclass(frozen=True)
class Factorization:
    """Triple with f = n o r o star(m); n, m in m_class, r in r_class."""

    n: int
    r: int
    m: int


@dataclass(frozen=True)
class DerivedClasses:
    r_class: frozenset
    s_class: frozenset
    k_class: frozenset
    i_class: frozenset


class SubPoset:
    """Iso-classes of embeddings into one object, with their factorization order.

    elements are canonical representatives (least morphism id in each class),
    in increasing id order.  leq is the order "factors through"; the
    linearization lists classes so that every order relation, and every
    retraction-compatibility relation used by the triangular comparison
    matrix, points forward.
    """

    def __init__(self, obj, elements, leq_pairs, lin):
        self.object = obj
        self.elements = elements
        self._pos = {m: i for i, m in enumerate(elements)}
        self._leq = leq_pairs  # set of (rep_a, rep_b) with [a] <= [b]
        self.linearization = lin

    def __len__(self):
        return len(self.elements)

    def index_of(self, rep):
        return self._pos[rep]

    def leq(self, rep_a, rep_b):
        return (rep_a, rep_b) in self._leq

    def top(self):
        """The class of the identity: the whole object."""
        return self.linearization[-1]

    def proper(self):
        return [m for m in self.elements if m != self.top()]

    def maximal_proper(self):
        top = self.top()
        out = []
        for m in self.elements:
            if m == top:
                continue
            if all(
                n == m or n == top or not self.leq(m, n) for n in self.elements
            ):
                out.append(m)
        return out

    def check(self):
        """Partial-order axioms plus unique-maximum; returns list of problems."""
        problems = []
        els = self.elements
        for a in els:
            if not self.leq(a, a):
                problems.append(f"not reflexive at {a}")
        for a in els:
            for b in els:
                if a != b and self.leq(a, b) and self.leq(b, a):
                    problems.append(f"not antisymmetric at ({a},{b})")
                for c in els:
                    if self.leq(a, b) and self.leq(b, c) and not self.leq(a, c):
                        problems.append(f"not transitive at ({a},{b},{c})")
        top = self.top()
        for a in els:
            if not self.leq(a, top):
                problems.append(f"{a} not below the whole object")
        pos = {m: i for i, m in enumerate(self.linearization)}
        for a in els:
            for b in els:
                if self.leq(a, b) and pos[a] > pos[b]:
                    problems.append(f"linearization violates order at ({a},{b})")
        return problems


class MRStructure:
    """A finite category with chosen split embeddings and retractions."""

    def __init__(self, cat: FinCat, m_class, star):
        self.cat = cat
        self.m_class = frozenset(m_class)
        self.star = dict(star)
        self._derived = None
        self._canonical_emb = None
        self._nr_decomp = None
        self._facts = {}
        self._sub_posets = {}
        self._s_parts = None
        self._d_cat = None

    # -- structural validation ---------------------------------------------

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        cat = self.cat
        n = cat.n_morphisms
        for m in self.m_class:
            if not (0 <= m < n):
                rep.add_structural("dangling embedding id", m=m)
                return rep
        for a in cat.objects():
            if cat.identity(a) not in self.m_class:
                rep.add_structural("identity not in m_class", object=a)
        for i in sorted(cat.isos()):
            if i not in self.m_class:
                rep.add_structural("isomorphism not in m_class", morphism=i)
        ms = sorted(self.m_class)
        for m in ms:
            for f in ms:
                if cat.composable(m, f) and cat.compose(m, f) not in self.m_class:
                    rep.add_structural(
                        "m_class not closed under composition", g=m, f=f
                    )
        if set(self.star) != set(self.m_class):
            rep.add_structural(
                "star must be defined exactly on m_class",
                missing=sorted(set(self.m_class) - set(self.star)),
                extra=sorted(set(self.star) - set(self.m_class)),
            )
            return rep
        for m in ms:
            sm = self.star[m]
            if not (0 <= sm < n):
                rep.add_structural("dangling star id", m=m, star=sm)
                continue
            if cat.dom[sm] != cat.cod[m] or cat.cod[sm] != cat.dom[m]:
                rep.add_structural("star does not swap endpoints", m=m, star=sm)
                continue
            if cat.compose(sm, m) != cat.identity(cat.dom[m]):
                rep.add_structural("star(m) o m != id", m=m, star=sm)
        if rep.structural:
            return rep
        for a in cat.objects():
            i = cat.identity(a)
            if self.star[i] != i:
                rep.add_structural("star(id) != id", object=a)
        for m in ms:
            for f in ms:
                if cat.composable(m, f):
                    lhs = self.star[cat.compose(m, f)]
                    rhs = cat.compose(self.star[f], self.star[m])
                    if lhs != rhs:
                        rep.add_structural(
                            "star not contravariantly functorial", g=m, f=f
                        )
        return rep

    # -- derived classes -----------------------------------------------------

    def derived(self) -> DerivedClasses:
        if self._derived is None:
            cat = self.cat
            isos = cat.isos()
            noninv = [m for m in sorted(self.m_class) if m not in isos]
            bad = set()
            for m in noninv:
                row = cat.comp[m]
                for y in cat._hom_into(cat.dom[m]):
                    bad.add(row[y])
            for m in noninv:
                sm = self.star[m]
                for z in cat.morphisms_from(cat.dom[m]):
                    bad.add(cat.comp[z][sm])
            r_class = frozenset(f for f in cat.morphisms() if f not in bad)
            s_class = frozenset(
                cat.comp[r][self.star[m]]
                for m in self.m_class
                for r in r_class
                if cat.dom[r] == cat.dom[m]
            )
            k_class = frozenset(
                cat.comp[m][self.star[nn]]
                for nn in self.m_class
                for m in self.m_class
                if cat.dom[m] == cat.dom[nn]
            )
            self._derived = DerivedClasses(r_class, s_class, k_class, frozenset(isos))
        return self._derived

    @property
    def r_class(self):
        return self.derived().r_class

    @property
    def s_class(self):
        return self.derived().s_class

    @property
    def k_class(self):
        return self.derived().k_class

    # -- canonical class representatives -------------------------------------

    def canonical_emb(self, m):
        """Least member of the iso-class of the embedding m (precomposition
        by isomorphisms)."""
        if self._canonical_emb is None:
            self._canonical_emb = {}
        out = self._canonical_emb.get(m)
        if out is None:
            cat = self.cat
            out = min(cat.comp[m][i] for i in cat.isos_into(cat.dom[m]))
            self._canonical_emb[m] = out
        return out

    # -- factorization --------------------------------------------------------

    def _decomps(self):
        """All composites n o r with n in m_class, r in r_class, keyed by value."""
        if self._nr_decomp is None:
            cat = self.cat
            table = {}
            for nn in sorted(self.m_class):
                for r in sorted(self.r_class):
                    if cat.cod[r] == cat.dom[nn]:
                        table.setdefault(cat.comp[nn][r], []).append((nn, r))
            self._nr_decomp = table
        return self._nr_decomp

    def factor_candidates(self, f):
        """Every valid triple (n, r, m) with f = n o r o star(m)."""
        cat = self.cat
        decomps = self._decomps()
        cands = []
        for m in sorted(self.m_class):
            if cat.cod[m] != cat.dom[f]:
                continue
            g = cat.comp[f][m]
            for (nn, r) in decomps.get(g, ()):
                if cat.comp[g][self.star[m]] == f:
                    cands.append(Factorization(nn, r, m))
        return cands

    def conjugacy_orbit(self, f, fact: Factorization):
        """All triples obtained from fact by re-choosing the embeddings up to
        isomorphism: n' = n o a, m' = m o b, r' = inv(a) o r o b."""
        cat = self.cat
        orbit = set()
        for a in cat.isos_into(cat.dom[fact.n]):
            na = cat.comp[fact.n][a]
            ra = cat.comp[cat.iso_inverse(a)][fact.r]
            for b in cat.isos_into(cat.dom[fact.m]):
                orbit.add(
                    Factorization(na, cat.comp[ra][b], cat.comp[fact.m][b])
                )
        return orbit

    def factorize(self, f) -> Factorization:
        """The canonical triple (n, r, m) with f = n o r o star(m).

        Existence and uniqueness up to isomorphism are verified on the way;
        the returned triple has canonical representatives as its embedding
        parts and the least middle among those.
        """
        out = self._facts.get(f)
        if out is not None:
            return out
        cands = self.factor_candidates(f)
        if not cands:
            raise NoFactorizationError(f)
        orbit = self.conjugacy_orbit(f, cands[0])
        cand_set = set(cands)
        assert orbit <= cand_set, "conjugates of a valid triple must be valid"
        if orbit != cand_set:
            other = min(cand_set - orbit, key=lambda t: (t.n, t.r, t.m))
            raise AmbiguousFactorizationError(f, cands[0], other)
        canon = [
            t
            for t in cands
            if self.canonical_emb(t.n) == t.n and self.canonical_emb(t.m) == t.m
        ]
        out = min(canon, key=lambda t: t.r)
        self._facts[f] = out
        return out

    def _all_parts(self):
        if self._s_parts is None:
            cat = self.cat
            m_part = []
            s_part = []
            for u in cat.morphisms():
                fact = self.factorize(u)
                m_part.append(fact.n)
                s_part.append(cat.comp[fact.r][self.star[fact.m]])
            r = self.r_class
            self._s_parts = (
                tuple(m_part),
                tuple(s_part),
                tuple(s in r for s in s_part),
            )
        return self._s_parts

    def m_part(self, u):
        """The embedding through which u lands: u = m_part(u) o s_part(u)."""
        return self._all_parts()[0][u]

    def s_part(self, u):
        return self._all_parts()[1][u]

    def s_in_r(self, u):
        """Whether the non-embedding part of u is irreducible."""
        return self._all_parts()[2][u]

    # -- subobject posets ------------------------------------------------------

    def sub_poset(self, a) -> SubPoset:
        cached = self._sub_posets.get(a)
        if cached is not None:
            return cached
        cat = self.cat
        reps = sorted(
            {self.canonical_emb(m) for m in self.m_class if cat.cod[m] == a}
        )
        leq = set()
        compat = set()  # retraction-compatibility: star(n) o m is an embedding
        for m in reps:
            for nn in reps:
                t = cat.comp[self.star[nn]][m]
                if cat.comp[nn][t] == m:
                    leq.add((m, nn))
                if t in self.m_class:
                    compat.add((m, nn))
        # topological sort of the union relation, least representative first
        edges = {m: set() for m in reps}
        indeg = {m: 0 for m in reps}
        for (x, y) in leq | compat:
            if x != y and y not in edges[x]:
                edges[x].add(y)
                indeg[y] += 1
        ready = [m for m in reps if indeg[m] == 0]
        heapq.heapify(ready)
        lin = []
        while ready:
            m = heapq.heappop(ready)
            lin.append(m)
            for y in sorted(edges[m]):
                indeg[y] -= 1
                if indeg[y] == 0:
                    heapq.heappush(ready, y)
        if len(lin) != len(reps):
            raise StructureError(
                f"subobject relations of object {a} contain a cycle"
            )
        poset = SubPoset(a, reps, leq, lin)
        if poset.top() != self.canonical_emb(cat.identity(a)):
            raise StructureError(
                f"whole object is not the maximum of the subobjects of {a}"
            )
        self._sub_posets[a] = poset
        return poset

    # -- serialization ----------------------------------------------------------

    def to_jsonable(self):
        data = self.cat.to_jsonable()
        data["m_class"] = sorted(self.m_class)
        data["star"] = {str(m): str(self.star[m]) for m in sorted(self.m_class)}
        return data

    @classmethod
    def from_jsonable(cls, data) -> "MRStructure":
        cat = FinCat.from_jsonable(data)
        star = {int(k): int(v) for k, v in data["star"].items()}
        return cls(cat, data["m_class"], star)

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_jsonable(), **kwargs)

    @classmethod
    def from_json(cls, text) -> "MRStructure":
        return cls.from_jsonable(json.loads(text))

    def __repr__(self):
        return (
            f"MRStructure({self.cat!r}, {len(self.m_class)} embeddings)"
        )


# -- zero-completed category ---------------------------------------------------


class DCat:
    """The category on r_class with one formal zero adjoined per hom-pair.

    Composition of irreducible morphisms is as in the base category when the
    result is again irreducible, and falls to the zero morphism otherwise;
    zeros are absorbing.
    """

    def __init__(self, structure: MRStructure):
        self.structure = structure
        base = structure.cat
        r = sorted(structure.r_class)
        self.r_to_d = {}
        dom, cod, labels = [], [], []
        for p in r:
            self.r_to_d[p] = len(dom)
            dom.append(base.dom[p])
            cod.append(base.cod[p])
            labels.append(base.mor_labels[p])
        self.d_to_r = list(r)
        self.zero = {}
        for a in range(base.n_objects):
            for b in range(base.n_objects):
                self.zero[(a, b)] = len(dom)
                self.d_to_r.append(None)
                dom.append(a)
                cod.append(b)
                labels.append(f"0:{a}->{b}")
        n = len(dom)
        nz = len(r)
        comp = [[None] * n for _ in range(n)]
        rset = structure.r_class
        for g in range(n):
            for f in range(n):
                if cod[f] != dom[g]:
                    continue
                if g >= nz or f >= nz:
                    comp[g][f] = self.zero[(dom[f], cod[g])]
                    continue
                p = base.comp[self.d_to_r[g]][self.d_to_r[f]]
                if p in rset:
                    comp[g][f] = self.r_to_d[p]
                else:
                    comp[g][f] = self.zero[(dom[f], cod[g])]
        identities = [self.r_to_d[base.identity(a)] for a in base.objects()]
        self.cat = FinCat(
            base.n_objects, dom, cod, identities, comp, base.obj_labels, labels
        )
        self.n_nonzero = nz

    def is_zero(self, d_mor):
        return self.d_to_r[d_mor] is None

    def nonzero_morphisms(self):
        return range(self.n_nonzero)

    def zero_of(self, a, b):
        return self.zero[(a, b)]

    def __repr__(self):
        return f"DCat({self.n_nonzero} nonzero morphisms + zeros)"


def build_d_cat(s: MRStructure) -> DCat:
    if s._d_cat is None:
        s._d_cat = DCat(s)
    return s._d_cat


# -- assumption checking ---------------------------------------------------------


@dataclass
class AssumptionCheck:
    key: str
    description: str
    passed: bool
    witness: object = None

    def to_jsonable(self):
        return {
            "key": self.key,
            "description": self.description,
            "passed": self.passed,
            "witness": self.witness,
        }


class AssumptionReport:
    def __init__(self, structural: ValidationReport, checks, class_sizes=None):
        self.structural = structural
        self.checks = checks
        self.class_sizes = class_sizes or {}

    @property
    def passed(self):
        return self.structural.ok and all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_jsonable(self):
        return {
            "structural": self.structural.to_jsonable(),
            "assumptions": [c.to_jsonable() for c in self.checks],
            "class_sizes": self.class_sizes,
            "passed": self.passed,
        }

    def __repr__(self):
        state = "pass" if self.passed else "FAIL"
        return f"AssumptionReport({state}, {len(self.checks)} checks)"


def _label(cat, f):
    return cat.mor_labels[f]


def check_assumptions(s: MRStructure) -> AssumptionReport:
    """Verify every structural axiom the transport theory relies on.

    Structural invariants are checked first; when they fail the axiom checks
    are not attempted.  Each axiom failure carries a concrete witness.
    """
    structural = s.validate()
    if not structural.ok:
        return AssumptionReport(structural, [])
    cat = s.cat
    checks = []

    # unique three-part factorization of every morphism
    witness = None
    for f in cat.morphisms():
        cands = s.factor_candidates(f)
        if not cands:
            witness = {"morphism": f, "label": _label(cat, f), "reason": "none"}
            break
        orbit = s.conjugacy_orbit(f, cands[0])
        extra = set(cands) - orbit
        if extra:
            other = min(extra, key=lambda t: (t.n, t.r, t.m))
            first = cands[0]
            witness = {
                "morphism": f,
                "label": _label(cat, f),
                "reason": "non-conjugate triples",
                "triples": [[first.n, first.r, first.m], [other.n, other.r, other.m]],
            }
            break
    checks.append(
        AssumptionCheck(
            "factorization",
            "every morphism factors as embedding o irreducible o retraction, "
            "uniquely up to isomorphism",
            witness is None,
            witness,
        )
    )

    der = s.derived()
    r_by_dom = {}
    for r in sorted(der.r_class):
        r_by_dom.setdefault(cat.dom[r], []).append(r)

    # composites of irreducibles land in s_class
    witness = None
    for r in sorted(der.r_class):
        for r2 in r_by_dom.get(cat.cod[r], ()):
            if cat.comp[r2][r] not in der.s_class:
                witness = {
                    "r": r, "r2": r2,
                    "labels": [_label(cat, r), _label(cat, r2)],
                }
                break
        if witness:
            break
    checks.append(
        AssumptionCheck(
            "composition",
            "a composite of two irreducible morphisms is irreducible after "
            "a retraction",
            witness is None,
            witness,
        )
    )

    # star(m) o r irreducible forces m invertible
    witness = None
    isos = cat.isos()
    for m in sorted(s.m_class):
        if m in isos:
            continue
        sm = s.star[m]
        for r in sorted(der.r_class):
            if cat.cod[r] == cat.cod[m] and cat.comp[sm][r] in der.r_class:
                witness = {
                    "m": m, "r": r,
                    "labels": [_label(cat, m), _label(cat, r)],
                }
                break
        if witness:
            break
    checks.append(
        AssumptionCheck(
            "cancellation",
            "a retraction of a non-invertible embedding never leaves an "
            "irreducible morphism irreducible",
            witness is None,
            witness,
        )
    )

    # embedding-after-retraction composites are closed under composition
    witness = None
    k_by_dom = {}
    for k in sorted(der.k_class):
        k_by_dom.setdefault(cat.dom[k], []).append(k)
    for k in sorted(der.k_class):
        for k2 in k_by_dom.get(cat.cod[k], ()):
            if cat.comp[k2][k] not in der.k_class:
                witness = {
                    "k": k, "k2": k2,
                    "labels": [_label(cat, k), _label(cat, k2)],
                }
                break
        if witness:
            break
    checks.append(
        AssumptionCheck(
            "closure",
            "embedding-after-retraction composites form a subcategory",
            witness is None,
            witness,
        )
    )

    # finite subobject posets with a unique maximum at every object
    witness = None
    sizes = {}
    for a in cat.objects():
        try:
            poset = s.sub_poset(a)
            problems = poset.check()
            if problems:
                witness = {"object": a, "problems": problems}
                break
            sizes[str(a)] = len(poset)
        except StructureError as e:
            witness = {"object": a, "problems": [str(e)]}
            break
    checks.append(
        AssumptionCheck(
            "finiteness",
            "the subobject classes of each object form a finite poset with "
            "the whole object as unique maximum",
            witness is None,
            witness if witness else {"sizes": sizes},
        )
    )

    # derived sanity: if t o s = embedding o irreducible with s, t both of
    # the retracted form, then s and t are already irreducible
    witness = None
    r_by_cod = {}
    for r in sorted(der.r_class):
        r_by_cod.setdefault(cat.cod[r], []).append(r)
    mr_values = set()
    for m in sorted(s.m_class):
        for r in r_by_cod.get(cat.dom[m], ()):
            mr_values.add(cat.comp[m][r])
    s_sorted = sorted(der.s_class)
    s_by_dom = {}
    for t in s_sorted:
        s_by_dom.setdefault(cat.dom[t], []).append(t)
    for u in s_sorted:
        for t in s_by_dom.get(cat.cod[u], ()):
            if cat.comp[t][u] in mr_values:
                if u not in der.r_class or t not in der.r_class:
                    witness = {
                        "s": u, "t": t,
                        "labels": [_label(cat, u), _label(cat, t)],
                    }
                    break
        if witness:
            break
    checks.append(
        AssumptionCheck(
            "sandwich",
            "when a composite of two retracted-form morphisms equals an "
            "embedding after an irreducible, both factors are irreducible",
            witness is None,
            witness,
        )
    )

    sizes = {
        "morphisms": cat.n_morphisms,
        "m_class": len(s.m_class),
        "r_class": len(der.r_class),
        "s_class": len(der.s_class),
        "k_class": len(der.k_class),
        "i_class": len(der.i_class),
    }
    return AssumptionReport(structural, checks, sizes)


# -- ordered idempotents (maximal proper subobjects) ------------------------------


def idempotent_ordering(s: MRStructure, a, cap=8):
    """Search for an ordering m_1..m_k of the maximal proper subobjects of a
    such that the idempotents c_i = m_i o star(m_i) satisfy
    c_j c_i c_j = c_j c_i whenever i < j.  Returns the ordering (list of
    representative embeddings) or None; factorial search, capped.
    """
    cat = s.cat
    poset = s.sub_poset(a)
    maxima = poset.maximal_proper()
    if len(maxima) > cap:
        raise ValueError(
            f"{len(maxima)} maximal proper subobjects exceeds the search cap {cap}"
        )
    cs = {m: cat.comp[m][s.star[m]] for m in maxima}
    for perm in itertools.permutations(maxima):
        ok = True
        for j in range(len(perm)):
            for i in range(j):
                ci, cj = cs[perm[i]], cs[perm[j]]
                if cat.comp[cj][cat.comp[ci][cj]] != cat.comp[cj][ci]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return list(perm)
    return None


# -- coend bijections --------------------------------------------------------------


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass
class CoendPairReport:
    kind: str
    source: int
    target: int
    class_count: int
    target_count: int
    problems: list

    @property
    def ok(self):
        return not self.problems and self.class_count == self.target_count

    def to_jsonable(self):
        return {
            "kind": self.kind,
            "source": self.source,
            "target": self.target,
            "class_count": self.class_count,
            "target_count": self.target_count,
            "problems": self.problems,
            "ok": self.ok,
        }


class CoendReport:
    def __init__(self, entries):
        self.entries = entries

    @property
    def ok(self):
        return all(e.ok for e in self.entries)

    def lookup(self, kind, source, target):
        for e in self.entries:
            if (e.kind, e.source, e.target) == (kind, source, target):
                return e
        raise KeyError((kind, source, target))

    def to_jsonable(self):
        return {"entries": [e.to_jsonable() for e in self.entries], "ok": self.ok}


def verify_coend_bijections(s: MRStructure) -> CoendReport:
    """Check the two colimit comparison maps that reduce the transport
    problem to the embedding-after-retraction subcategory.

    For each pair of objects the relevant identification classes are built
    by union-find over their generating relations, and the induced map onto
    p{u : s_part(u) irreducible} is checked to be a bijection of pointed
    sets.  Non-injective or non-surjective instances are reported with
    witnesses.
    """
    cat = s.cat
    der = s.derived()
    isos = cat.isos()
    entries = []

    m_by_cod = {}
    m_by_dom = {}
    for m in sorted(s.m_class):
        m_by_cod.setdefault(cat.cod[m], []).append(m)
        m_by_dom.setdefault(cat.dom[m], []).append(m)
    r_by_cod = {}
    for r in sorted(der.r_class):
        r_by_cod.setdefault(cat.cod[r], []).append(r)

    def target_set(a, b):
        return [u for u in cat.hom(a, b) if s.s_in_r(u)]

    # right comparison: pairs (embedding m, irreducible r) composing to D,
    # identified along the isomorphism action on the middle object
    for a in cat.objects():
        for d in cat.objects():
            pairs = []
            for m in m_by_cod.get(d, ()):
                for r in r_by_cod.get(cat.dom[m], ()):
                    if cat.dom[r] == a:
                        pairs.append((m, r))
            dsu = _DSU(pairs)
            for (m, r) in pairs:
                c = cat.dom[m]
                for i in cat.isos_into(c):
                    # (m o i, r') ~ (m, i o r') for r' into the source of i
                    mi = cat.comp[m][i]
                    for r2 in r_by_cod.get(cat.dom[i], ()):
                        if cat.dom[r2] == a:
                            dsu.union((mi, r2), (m, cat.comp[i][r2]))
            problems = []
            values = {}
            for root, members in dsu.classes().items():
                vals = {cat.comp[m][r] for (m, r) in members}
                if len(vals) > 1:
                    problems.append(
                        {"problem": "value not constant on class",
                         "values": sorted(vals)}
                    )
                    continue
                v = vals.pop()
                if not s.s_in_r(v):
                    problems.append(
                        {"problem": "class maps outside the target", "value": v}
                    )
                elif v in values:
                    problems.append(
                        {"problem": "two classes share a value", "value": v}
                    )
                else:
                    values[v] = root
            tgt = target_set(a, d)
            for u in tgt:
                if u not in values:
                    problems.append({"problem": "value not hit", "value": u})
            entries.append(
                CoendPairReport(
                    "right", a, d, len(dsu.classes()), len(tgt), problems
                )
            )

    # left comparison: pairs (any g, embedding m) through a middle object,
    # identified along the embedding-after-retraction subcategory including
    # the fall-to-zero identifications
    BASE = ("base",)
    k_by_dom = {}
    for k in sorted(der.k_class):
        k_by_dom.setdefault(cat.dom[k], []).append(k)
    for c in cat.objects():
        for b in cat.objects():
            pairs = []
            for m in m_by_dom.get(c, ()):
                for g in cat.hom(cat.cod[m], b):
                    pairs.append((g, m))
            dsu = _DSU(pairs + [BASE])
            for m in m_by_dom.get(c, ()):
                d0 = cat.cod[m]
                for k in k_by_dom.get(d0, ()):
                    km = cat.comp[k][m]
                    for g in cat.hom(cat.cod[k], b):
                        gk = cat.comp[g][k]
                        if km in s.m_class:
                            dsu.union((gk, m), (g, km))
                        else:
                            dsu.union((gk, m), BASE)
            problems = []
            values = {}
            base_root = dsu.find(BASE)
            for root, members in dsu.classes().items():
                vals = set()
                for member in members:
                    if member == BASE:
                        vals.add(None)
                        continue
                    g, m = member
                    u = cat.comp[g][m]
                    vals.add(u if s.s_in_r(u) else None)
                if len(vals) > 1:
                    problems.append(
                        {"problem": "value not constant on class",
                         "values": [v if v is not None else "zero" for v in sorted(vals, key=str)]}
                    )
                    continue
                v = vals.pop()
                if root == base_root:
                    if v is not None:
                        problems.append(
                            {"problem": "basepoint class has nonzero value",
                             "value": v}
                        )
                    continue
                if v is None:
                    problems.append(
                        {"problem": "non-basepoint class maps to zero",
                         "witness": sorted(members)[0]}
                    )
                elif v in values:
                    problems.append(
                        {"problem": "two classes share a value", "value": v}
                    )
                else:
                    values[v] = root
            tgt = target_set(c, b)
            for u in tgt:
                if u not in values:
                    problems.append({"problem": "value not hit", "value": u})
            nonbase = len(dsu.classes()) - 1
            entries.append(
                CoendPairReport("left", c, b, nonbase, len(tgt), problems)
            )

    return CoendReport(entries)


# -- restriction to the embedding-after-retraction subcategory ---------------------


def restricted_to_k(s: MRStructure):
    """The induced structure on the subcategory of embedding-after-retraction
    composites, with the same embeddings; returns (structure, morphism map).
    """
    cat = s.cat
    der = s.derived()
    kept = sorted(der.k_class)
    old_to_new = {p: i for i, p in enumerate(kept)}
    for k in kept:
        for k2 in kept:
            if cat.composable(k2, k) and cat.comp[k2][k] not in old_to_new:
                raise StructureError(
                    "embedding-after-retraction composites are not closed; "
                    f"witness ({k2}, {k})"
                )
    comp = [
        [
            old_to_new[cat.comp[g][f]] if cat.composable(g, f) else None
            for f in kept
        ]
        for g in kept
    ]
    sub = FinCat(
        cat.n_objects,
        [cat.dom[p] for p in kept],
        [cat.cod[p] for p in kept],
        [old_to_new[cat.identity(a)] for a in cat.objects()],
        comp,
        cat.obj_labels,
        [cat.mor_labels[p] for p in kept],
    )
    m_new = [old_to_new[m] for m in sorted(s.m_class)]
    star_new = {old_to_new[m]: old_to_new[s.star[m]] for m in sorted(s.m_class)}
    return MRStructure(sub, m_new, star_new), old_to_new


# -- spec-level convenience wrappers ------------------------------------------------


def compute_r_class(s: MRStructure) -> frozenset:
    return s.r_class


def factorize(s: MRStructure, f) -> Factorization:
    return s.factorize(f)


def s_part(s: MRStructure, u):
    return s.s_part(u)


def m_part(s: MRStructure, u):
    return s.m_part(u)


def sub_poset(s: MRStructure, a) -> SubPoset:
    return s.sub_poset(a)
