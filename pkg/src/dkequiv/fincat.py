"""Finite categories given by explicit composition tables.

Objects and morphisms are 0-based indices into the category's lists; the
composition table comp[g][f] holds g after f, with None exactly where the
endpoints do not match.  Values are immutable after construction.
"""

from __future__ import annotations

import json


class FinCatError(Exception):
    pass


class ValidationReport:
    """Violations found by a structural/law check; empty means valid."""

    def __init__(self):
        self.structural = []
        self.law = []

    def add_structural(self, message, **witness):
        self.structural.append({"message": message, **witness})

    def add_law(self, message, **witness):
        self.law.append({"message": message, **witness})

    @property
    def ok(self):
        return not self.structural and not self.law

    def to_jsonable(self):
        return {"structural": self.structural, "law": self.law, "ok": self.ok}

    def __repr__(self):
        if self.ok:
            return "ValidationReport(ok)"
        return (
            f"ValidationReport({len(self.structural)} structural, "
            f"{len(self.law)} law violations)"
        )


class FinCat:
    """A finite category: objects 0..n-1, morphisms with dom/cod/comp tables."""

    def __init__(self, n_objects, dom, cod, identities, comp,
                 obj_labels=None, mor_labels=None):
        self.n_objects = n_objects
        self.dom = tuple(dom)
        self.cod = tuple(cod)
        self.identities = tuple(identities)
        self.comp = tuple(tuple(row) for row in comp)
        self.obj_labels = tuple(obj_labels) if obj_labels else tuple(
            str(i) for i in range(n_objects)
        )
        self.mor_labels = tuple(mor_labels) if mor_labels else tuple(
            f"m{i}" for i in range(len(self.dom))
        )
        n = len(self.dom)
        assert len(self.cod) == n and len(self.mor_labels) == n
        assert len(self.identities) == n_objects
        assert len(self.comp) == n and all(len(row) == n for row in self.comp)
        self._hom = {}
        self._into = {a: [] for a in range(n_objects)}
        self._outof = {a: [] for a in range(n_objects)}
        for f in range(n):
            self._hom.setdefault((self.dom[f], self.cod[f]), []).append(f)
            self._into[self.cod[f]].append(f)
            self._outof[self.dom[f]].append(f)
        self._isos = None

    # -- basics ------------------------------------------------------------

    @property
    def n_morphisms(self):
        return len(self.dom)

    def morphisms(self):
        return range(self.n_morphisms)

    def objects(self):
        return range(self.n_objects)

    def hom(self, a, b):
        """All morphisms a -> b in stable index order."""
        assert 0 <= a < self.n_objects and 0 <= b < self.n_objects
        return list(self._hom.get((a, b), []))

    def identity(self, a):
        return self.identities[a]

    def is_identity(self, f):
        return self.identities[self.dom[f]] == f

    def compose(self, g, f):
        """g after f; endpoints must match."""
        h = self.comp[g][f]
        if h is None:
            raise FinCatError(
                f"morphisms not composable: cod({f})={self.cod[f]} "
                f"!= dom({g})={self.dom[g]}"
            )
        return h

    def composable(self, g, f):
        return self.cod[f] == self.dom[g]

    # -- checks ------------------------------------------------------------

    def check(self) -> ValidationReport:
        """Exhaustive category-law check; reports every violated instance."""
        rep = ValidationReport()
        n = self.n_morphisms
        for a in range(self.n_objects):
            i = self.identities[a]
            if not (0 <= i < n):
                rep.add_structural("dangling identity id", object=a, value=i)
            elif self.dom[i] != a or self.cod[i] != a:
                rep.add_structural("identity has wrong endpoints", object=a, morphism=i)
        for g in range(n):
            for f in range(n):
                h = self.comp[g][f]
                defined = h is not None
                should = self.cod[f] == self.dom[g]
                if defined != should:
                    rep.add_structural(
                        "comp defined iff endpoints match violated", g=g, f=f
                    )
                    continue
                if defined:
                    if not (0 <= h < n):
                        rep.add_structural("dangling composite id", g=g, f=f, value=h)
                    elif self.dom[h] != self.dom[f] or self.cod[h] != self.cod[g]:
                        rep.add_structural(
                            "composite has wrong endpoints", g=g, f=f, composite=h
                        )
        if rep.structural:
            return rep
        comp = self.comp
        for f in range(n):
            if comp[self.identities[self.cod[f]]][f] != f:
                rep.add_law("id o f != f", f=f, label=self.mor_labels[f])
            if comp[f][self.identities[self.dom[f]]] != f:
                rep.add_law("f o id != f", f=f, label=self.mor_labels[f])
        # associativity: h o (g o f) == (h o g) o f over every composable triple
        by_dom = {}
        for h in range(n):
            by_dom.setdefault(self.dom[h], []).append(h)
        for g in range(n):
            row_g = comp[g]
            outs = by_dom.get(self.cod[g], [])
            hg = {h: comp[h][g] for h in outs}
            for f in self._hom_into(self.dom[g]):
                gf = row_g[f]
                for h in outs:
                    if comp[h][gf] != comp[hg[h]][f]:
                        rep.add_law("associativity violated", h=h, g=g, f=f)
        return rep

    def _hom_into(self, a):
        return self._into[a]

    def morphisms_into(self, a):
        return list(self._into[a])

    def morphisms_from(self, a):
        return list(self._outof[a])

    # -- derived data --------------------------------------------------------

    def isos(self):
        """Morphisms with a two-sided inverse."""
        if self._isos is None:
            invertible = set()
            self._iso_inverse = {}
            for (a, b), fs in self._hom.items():
                back = self._hom.get((b, a), [])
                for f in fs:
                    for g in back:
                        if (
                            self.comp[g][f] == self.identities[a]
                            and self.comp[f][g] == self.identities[b]
                        ):
                            invertible.add(f)
                            self._iso_inverse[f] = g
                            break
            self._isos = frozenset(invertible)
        return self._isos

    def iso_inverse(self, f):
        self.isos()
        return self._iso_inverse[f]

    def isos_into(self, a):
        return sorted(i for i in self.isos() if self.cod[i] == a)

    def opposite(self) -> "FinCat":
        n = self.n_morphisms
        comp_op = tuple(tuple(self.comp[f][g] for f in range(n)) for g in range(n))
        return FinCat(
            self.n_objects,
            self.cod,
            self.dom,
            self.identities,
            comp_op,
            self.obj_labels,
            self.mor_labels,
        )

    def generating_set(self):
        """Non-identity morphisms not expressible as a composite of two
        non-identities."""
        n = self.n_morphisms
        decomposable = set()
        for g in range(n):
            if self.is_identity(g):
                continue
            for f in self._hom_into(self.dom[g]):
                if self.is_identity(f):
                    continue
                decomposable.add(self.comp[g][f])
        return [
            f for f in range(n)
            if not self.is_identity(f) and f not in decomposable
        ]

    # -- serialization -------------------------------------------------------

    def to_jsonable(self):
        return {
            "objects": list(self.obj_labels),
            "morphisms": [
                {"dom": self.dom[f], "cod": self.cod[f], "label": self.mor_labels[f]}
                for f in range(self.n_morphisms)
            ],
            "identities": list(self.identities),
            "comp": [
                [-1 if x is None else x for x in row] for row in self.comp
            ],
        }

    @classmethod
    def from_jsonable(cls, data) -> "FinCat":
        objs = data["objects"]
        mors = data["morphisms"]
        comp = tuple(
            tuple(None if x == -1 else x for x in row) for row in data["comp"]
        )
        return cls(
            len(objs),
            [m["dom"] for m in mors],
            [m["cod"] for m in mors],
            data["identities"],
            comp,
            objs,
            [m.get("label", f"m{i}") for i, m in enumerate(mors)],
        )

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_jsonable(), **kwargs)

    @classmethod
    def from_json(cls, text) -> "FinCat":
        return cls.from_jsonable(json.loads(text))

    def __repr__(self):
        return f"FinCat({self.n_objects} objects, {self.n_morphisms} morphisms)"


class TableBuilder:
    """Helper for builders: collect morphisms keyed by payload, then compose."""

    def __init__(self, n_objects, obj_labels=None):
        self.n_objects = n_objects
        self.obj_labels = obj_labels
        self.keys = []
        self.index = {}
        self.dom = []
        self.cod = []
        self.labels = []

    def add(self, dom, cod, key, label=None):
        k = (dom, cod, key)
        if k in self.index:
            return self.index[k]
        i = len(self.keys)
        self.index[k] = i
        self.keys.append(k)
        self.dom.append(dom)
        self.cod.append(cod)
        self.labels.append(label if label is not None else str(key))
        return i

    def morphism_id(self, dom, cod, key):
        return self.index[(dom, cod, key)]

    def build(self, compose_keys, identity_keys) -> FinCat:
        """compose_keys(gkey, fkey) -> key of the composite payload."""
        n = len(self.keys)
        comp = [[None] * n for _ in range(n)]
        for g in range(n):
            gd, gc, gk = self.keys[g]
            for f in range(n):
                fd, fc, fk = self.keys[f]
                if fc != gd:
                    continue
                hk = compose_keys(gk, fk)
                comp[g][f] = self.index[(fd, gc, hk)]
        identities = [
            self.index[(a, a, identity_keys(a))] for a in range(self.n_objects)
        ]
        return FinCat(
            self.n_objects, self.dom, self.cod, identities, comp,
            self.obj_labels, self.labels,
        )
