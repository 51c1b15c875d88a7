"""Matrix-valued functors on a finite category and on its zero-completion.

An AdditiveFunctor assigns a dimension to every object and an exact rational
matrix to every morphism of a FinCat; a PointedFunctor does the same on a
zero-completed category, sending the formal zeros to zero matrices.  Both
are validated exhaustively.  Random pointed functors are generated from a
library of structurally-correct atoms and a seeded change of basis, so the
generator can never emit an invalid functor.
"""

from __future__ import annotations

import random

from .exactlin import QMat, direct_sum
from .fincat import FinCat, ValidationReport
from .structure import DCat


class FunctorError(Exception):
    pass


class InfeasibleRelations(FunctorError):
    """The requested dimension vector cannot be realized soundly."""


class AdditiveFunctor:
    def __init__(self, base: FinCat, dims, mats):
        self.base = base
        self.dims = tuple(dims)
        assert len(self.dims) == base.n_objects
        self.mats = dict(mats)

    def mat(self, f) -> QMat:
        return self.mats[f]

    def validate(self) -> ValidationReport:
        """Exhaustive functor-law check: shapes, identities, all composites."""
        rep = ValidationReport()
        base = self.base
        for f in base.morphisms():
            m = self.mats.get(f)
            if m is None:
                rep.add_structural("missing matrix", morphism=f)
            elif m.shape != (self.dims[base.cod[f]], self.dims[base.dom[f]]):
                rep.add_structural(
                    "matrix shape mismatch", morphism=f, shape=list(m.shape)
                )
        if not rep.ok:
            return rep
        for a in base.objects():
            if not self.mats[base.identity(a)].is_identity():
                rep.add_law("identity not sent to identity", object=a)
        for g in base.morphisms():
            mg = self.mats[g]
            for f in base._hom_into(base.dom[g]):
                if self.mats[base.comp[g][f]] != mg.mul(self.mats[f]):
                    rep.add_law("composition not preserved", g=g, f=f)
        return rep

    def to_jsonable(self, category=None):
        return {
            "kind": "additive",
            "category": category,
            "dims": list(self.dims),
            "mats": {str(f): self.mats[f].to_jsonable() for f in sorted(self.mats)},
        }

    @classmethod
    def from_jsonable(cls, base: FinCat, data):
        assert data.get("kind", "additive") == "additive"
        dims = data["dims"]
        mats = {
            int(k): QMat.from_jsonable(
                v, ncols=dims[base.dom[int(k)]]
            )
            for k, v in data["mats"].items()
        }
        return cls(base, dims, mats)

    def __repr__(self):
        return f"AdditiveFunctor(dims={list(self.dims)})"


class PointedFunctor:
    """Functor on a zero-completed category; zeros are implicit zero matrices."""

    def __init__(self, d: DCat, dims, mats):
        self.d = d
        self.dims = tuple(dims)
        assert len(self.dims) == d.cat.n_objects
        self.mats = dict(mats)  # keyed by nonzero morphism of d.cat

    def mat(self, d_mor) -> QMat:
        got = self.mats.get(d_mor)
        if got is not None:
            return got
        assert self.d.is_zero(d_mor), f"missing matrix for nonzero morphism {d_mor}"
        cat = self.d.cat
        return QMat.zeros(self.dims[cat.cod[d_mor]], self.dims[cat.dom[d_mor]])

    def validate(self) -> ValidationReport:
        """Exhaustive check including zero-composites falling to zero."""
        rep = ValidationReport()
        cat = self.d.cat
        for f in self.d.nonzero_morphisms():
            m = self.mats.get(f)
            if m is None:
                rep.add_structural("missing matrix", morphism=f)
            elif m.shape != (self.dims[cat.cod[f]], self.dims[cat.dom[f]]):
                rep.add_structural(
                    "matrix shape mismatch", morphism=f, shape=list(m.shape)
                )
        if not rep.ok:
            return rep
        for a in cat.objects():
            if not self.mats[cat.identity(a)].is_identity():
                rep.add_law("identity not sent to identity", object=a)
        for g in self.d.nonzero_morphisms():
            mg = self.mats[g]
            for f in self.d.nonzero_morphisms():
                if cat.cod[f] != cat.dom[g]:
                    continue
                h = cat.comp[g][f]
                prod = mg.mul(self.mats[f])
                if self.d.is_zero(h):
                    if not prod.is_zero():
                        rep.add_law("zero composite not sent to zero", g=g, f=f)
                elif self.mats[h] != prod:
                    rep.add_law("composition not preserved", g=g, f=f)
        return rep

    def to_jsonable(self, category=None):
        return {
            "kind": "pointed",
            "category": category,
            "dims": list(self.dims),
            "mats": {
                str(self.d.d_to_r[f]): self.mats[f].to_jsonable()
                for f in sorted(self.mats)
            },
        }

    @classmethod
    def from_jsonable(cls, d: DCat, data):
        assert data["kind"] == "pointed"
        dims = data["dims"]
        cat = d.cat
        mats = {}
        for k, v in data["mats"].items():
            dm = d.r_to_d[int(k)]
            mats[dm] = QMat.from_jsonable(v, ncols=dims[cat.dom[dm]])
        return cls(d, dims, mats)

    def __repr__(self):
        return f"PointedFunctor(dims={list(self.dims)})"


class NatTransform:
    """Object-indexed matrices between two functors on the same base."""

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = list(components)

    def component(self, a) -> QMat:
        return self.components[a]

    def _base(self):
        src = self.source
        return src.base if isinstance(src, AdditiveFunctor) else src.d.cat

    def _morphisms(self):
        src = self.source
        if isinstance(src, AdditiveFunctor):
            return src.base.morphisms()
        return src.d.nonzero_morphisms()

    def _mat(self, functor, f):
        if isinstance(functor, AdditiveFunctor):
            return functor.mat(f)
        return functor.mat(f)

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        base = self._base()
        for a in base.objects():
            comp = self.components[a]
            want = (self.target.dims[a], self.source.dims[a])
            if comp.shape != want:
                rep.add_structural(
                    "component shape mismatch", object=a, shape=list(comp.shape)
                )
        if not rep.ok:
            return rep
        for f in self._morphisms():
            a, b = base.dom[f], base.cod[f]
            lhs = self.components[b].mul(self._mat(self.source, f))
            rhs = self._mat(self.target, f).mul(self.components[a])
            if lhs != rhs:
                rep.add_law(
                    "naturality square does not commute",
                    morphism=f,
                    label=base.mor_labels[f],
                )
        return rep

    def is_iso(self) -> bool:
        for comp in self.components:
            if comp.nrows != comp.ncols:
                return False
            if comp.rank() != comp.nrows:
                return False
        return True

    def then(self, other: "NatTransform") -> "NatTransform":
        """other after self (source of other must be target of self)."""
        assert other.source is self.target or (
            other.source.dims == self.target.dims
        )
        comps = [
            other.components[a].mul(self.components[a])
            for a in range(len(self.components))
        ]
        return NatTransform(self.source, other.target, comps)

    def __repr__(self):
        return f"NatTransform({len(self.components)} components)"


def compose_nat(after: NatTransform, before: NatTransform) -> NatTransform:
    return before.then(after)


def is_iso(t: NatTransform) -> bool:
    return t.is_iso()


def random_invertible(n, rng) -> QMat:
    """Seeded unimodular matrix built from elementary operations."""
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        op = rng.randrange(3)
        i = rng.randrange(n)
        j = rng.randrange(n)
        if op == 0 and i != j:
            k = rng.choice((-2, -1, 1, 2))
            rows[j] = [x + k * y for x, y in zip(rows[j], rows[i])]
        elif op == 1:
            rows[i], rows[j] = rows[j], rows[i]
        else:
            rows[i] = [-x for x in rows[i]]
    return QMat.from_rows(rows, n)


def _projective_atom(d: DCat, c):
    """Basis 'all nonzero morphisms out of c', acted on by postcomposition."""
    cat = d.cat
    basis = {a: [u for u in d.nonzero_morphisms() if cat.dom[u] == c and cat.cod[u] == a]
             for a in cat.objects()}
    dims = tuple(len(basis[a]) for a in cat.objects())
    index = {a: {u: i for i, u in enumerate(basis[a])} for a in cat.objects()}

    def mat(r):
        a, b = cat.dom[r], cat.cod[r]
        rows = [[0] * dims[a] for _ in range(dims[b])]
        for col, u in enumerate(basis[a]):
            v = cat.comp[r][u]
            if not d.is_zero(v):
                rows[index[b][v]][col] = 1
        return QMat.from_rows(rows, dims[a])

    return dims, mat


def _unit_atom_valid(d: DCat, c):
    """Whether the one-dimensional atom concentrated at c is a functor:
    no nonzero endomorphism of c may factor through another object or have
    a composite of endomorphisms fall to zero."""
    cat = d.cat
    endos = [u for u in d.nonzero_morphisms() if cat.dom[u] == c and cat.cod[u] == c]
    for u in endos:
        for v in endos:
            if cat.cod[u] == cat.dom[v] and d.is_zero(cat.comp[v][u]):
                return False
    outs = [u for u in d.nonzero_morphisms()
            if cat.dom[u] == c and cat.cod[u] != c]
    for u in outs:
        for v in d.nonzero_morphisms():
            if cat.dom[v] == cat.cod[u] and cat.cod[v] == c:
                if not d.is_zero(cat.comp[v][u]):
                    return False
    return True


def _unit_atom(d: DCat, c):
    cat = d.cat
    dims = tuple(1 if a == c else 0 for a in cat.objects())

    def mat(r):
        a, b = cat.dom[r], cat.cod[r]
        if a == c and b == c:
            return QMat.identity(1)
        return QMat.zeros(dims[b], dims[a])

    return dims, mat


def random_pointed_functor(d: DCat, dims, seed) -> PointedFunctor:
    """Seed-deterministic pointed functor with the prescribed dimensions.

    Built as a direct sum of atoms (postcomposition modules and, where
    sound, one-dimensional units), conjugated by seeded invertible matrices
    at every object; the atoms satisfy every relation of the category by
    construction, so the output always validates.  Raises
    InfeasibleRelations when the dimension vector cannot be assembled from
    the available atoms.
    """
    cat = d.cat
    dims = tuple(dims)
    assert len(dims) == cat.n_objects
    rng = random.Random(seed)

    proj = {c: _projective_atom(d, c) for c in cat.objects()}
    unit_ok = {c: _unit_atom_valid(d, c) for c in cat.objects()}

    remaining = list(dims)
    atoms = []

    def fitting_projectives():
        out = []
        for c in cat.objects():
            vec = proj[c][0]
            if any(vec) and all(v <= r for v, r in zip(vec, remaining)):
                out.append(c)
        return out

    def take_projective(c):
        atoms.append(("P", c))
        for a in cat.objects():
            remaining[a] -= proj[c][0][a]

    cands = fitting_projectives()
    while cands and rng.random() < 0.7:
        take_projective(rng.choice(cands))
        cands = fitting_projectives()
    # deterministic completion: coordinates whose unit atom is unsound must
    # be covered by projectives, the rest topped up with unit atoms
    while True:
        hard = [
            c for c in cat.objects() if remaining[c] > 0 and not unit_ok[c]
        ]
        if not hard:
            break
        pick = next(
            (c for c in fitting_projectives() if proj[c][0][hard[0]] > 0),
            None,
        )
        if pick is None:
            raise InfeasibleRelations(
                f"cannot realize remaining dimension {remaining[hard[0]]} at "
                f"object {hard[0]} from the available atoms"
            )
        take_projective(pick)
    for c in cat.objects():
        while remaining[c] > 0:
            atoms.append(("T", c))
            remaining[c] -= 1
    rng.shuffle(atoms)

    atom_data = [
        proj[c] if kind == "P" else _unit_atom(d, c) for kind, c in atoms
    ]
    built_dims = [
        sum(data[0][a] for data in atom_data) for a in cat.objects()
    ]
    assert tuple(built_dims) == dims

    q = [random_invertible(dims[a], rng) for a in cat.objects()]
    q_inv = [m.inverse() for m in q]
    mats = {}
    for r in d.nonzero_morphisms():
        a, b = cat.dom[r], cat.cod[r]
        if atom_data:
            raw = direct_sum(*[data[1](r) for data in atom_data])
        else:
            raw = QMat.zeros(dims[b], dims[a])
        assert raw.shape == (dims[b], dims[a])
        mats[r] = q[b].mul(raw).mul(q_inv[a])
    return PointedFunctor(d, dims, mats)
