"""The transport engine between the two functor categories.

The kernel module tabulates, for each pair of objects, the pointed set of
morphisms whose non-embedding part is irreducible, with its two-sided
action.  From it the two transports are built combinatorially:

  hat   takes a pointed functor on the zero-completion to an ordinary
        functor, with value at B the direct sum over the subobject classes
        of B and block action read off from the three-part factorization;

  tilde takes an ordinary functor to a pointed one, with value at A the
        intersection of the kernels of the retractions of the proper
        subobjects of A, and action by restriction.

unit/counit/certify check constructively, per tested functor, that the two
transports are mutually inverse up to natural isomorphism; theta_matrix
builds the triangular coproduct-to-product comparison used to prove it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exactlin import (
    QMat,
    RestrictionError,
    Subspace,
    block,
    direct_sum,
    restrict,
    solve_exact,
)
from .functors import AdditiveFunctor, NatTransform, PointedFunctor
from .structure import MRStructure, build_d_cat


class TransportError(Exception):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TriangularityError(TransportError):
    pass


class KernelModule:
    """Pointed-set bimodule of morphisms with irreducible non-embedding part."""

    def __init__(self, structure: MRStructure, validate=True):
        self.structure = structure
        self.d = build_d_cat(structure)
        cat = structure.cat
        structure._all_parts()  # precompute factorizations
        self.elements = {}
        for a in cat.objects():
            for b in cat.objects():
                self.elements[(a, b)] = [
                    u for u in cat.hom(a, b) if structure.s_in_r(u)
                ]
        if validate:
            problems = self.validate()
            assert not problems, f"bimodule law failures: {problems[:3]}"

    def element_count(self, a, b):
        """Non-basepoint elements at (a, b)."""
        return len(self.elements[(a, b)])

    def act(self, d_r, f, u):
        """Two-sided action f o u o r; None is the basepoint."""
        if u is None or self.d.is_zero(d_r):
            return None
        s = self.structure
        cat = s.cat
        r = self.d.d_to_r[d_r]
        w = cat.comp[f][cat.comp[u][r]]
        return w if s.s_in_r(w) else None

    def validate(self):
        """Exhaustive bimodule-law check.

        The general law factors through the identity laws, the two
        one-variable composition laws, and the interchange law, each of
        which is checked over every instance; together these force the
        two-sided law for arbitrary composites.
        """
        s = self.structure
        cat = s.cat
        comp = cat.comp
        s_in_r = s._all_parts()[2]
        rset = s.r_class
        problems = []

        elems_by_dom = {a: [] for a in cat.objects()}
        elems_by_cod = {b: [] for b in cat.objects()}
        for (a, b), us in self.elements.items():
            elems_by_dom[a].extend(us)
            elems_by_cod[b].extend(us)

        # identity actions
        for (a, b), us in sorted(self.elements.items()):
            ia, ib = cat.identity(a), cat.identity(b)
            for u in us:
                if comp[ib][comp[u][ia]] != u or not s_in_r[u]:
                    problems.append(("identity", u))

        r_sorted = sorted(rset)
        r_by_cod = {}
        for r in r_sorted:
            r_by_cod.setdefault(cat.cod[r], []).append(r)

        # contravariant variable composed
        for r in r_sorted:
            a1, a = cat.dom[r], cat.cod[r]
            us = elems_by_dom[a]
            for r1 in r_by_cod.get(a1, ()):
                rr1 = comp[r][r1]
                rr1_in = rr1 in rset
                for u in us:
                    ur = comp[u][r]
                    step = comp[ur][r1] if s_in_r[ur] else None
                    if step is not None and not s_in_r[step]:
                        step = None
                    whole = comp[u][rr1] if rr1_in else None
                    if whole is not None and not s_in_r[whole]:
                        whole = None
                    if step != whole:
                        problems.append(("left", r, r1, u))

        # covariant variable composed
        for b in cat.objects():
            us = elems_by_cod[b]
            if not us:
                continue
            for f in cat.morphisms_from(b):
                cf = comp[f]
                tus = [(u, cf[u]) for u in us]
                for f1 in cat.morphisms_from(cat.cod[f]):
                    cf1 = comp[f1]
                    cff1 = comp[cf1[f]]
                    for (u, t) in tus:
                        if s_in_r[t]:
                            w = cf1[t]
                            step = w if s_in_r[w] else None
                        else:
                            step = None
                        w2 = cff1[u]
                        whole = w2 if s_in_r[w2] else None
                        if step != whole:
                            problems.append(("right", f, f1, u))

        # interchange of the two actions
        for r in r_sorted:
            a1, a = cat.dom[r], cat.cod[r]
            for u in elems_by_dom[a]:
                ur = comp[u][r]
                ur_ok = s_in_r[ur]
                for f in cat.morphisms_from(cat.cod[u]):
                    fu = comp[f][u]
                    fur = comp[f][ur]
                    both = fur if s_in_r[fur] else None
                    via_left = (comp[f][ur] if ur_ok else None)
                    if via_left is not None and not s_in_r[via_left]:
                        via_left = None
                    via_right = (comp[fu][r] if s_in_r[fu] else None)
                    if via_right is not None and not s_in_r[via_right]:
                        via_right = None
                    if not (via_left == via_right == both):
                        problems.append(("interchange", r, f, u))
        return problems


def build_kernel_module(s: MRStructure, validate=True) -> KernelModule:
    return KernelModule(s, validate=validate)


# -- the two transports ------------------------------------------------------


def _offsets(poset, dims_at):
    """(offset, width) per class representative, in linearization order."""
    out = {}
    pos = 0
    for rep in poset.linearization:
        w = dims_at(rep)
        out[rep] = (pos, w)
        pos += w
    return out, pos


def hat(km: KernelModule, f: PointedFunctor) -> AdditiveFunctor:
    """Left transport: direct sums over subobject classes, block action from
    the three-part factorization of (morphism o subobject)."""
    s = km.structure
    cat = s.cat
    d = km.d
    assert f.d is km.d or f.d.cat.n_objects == cat.n_objects

    def width(rep):
        return f.dims[cat.dom[rep]]

    posets = {a: s.sub_poset(a) for a in cat.objects()}
    offs = {}
    dims = []
    for a in cat.objects():
        offs[a], total = _offsets(posets[a], width)
        dims.append(total)

    mats = {}
    for g in cat.morphisms():
        a, b = cat.dom[g], cat.cod[g]
        grid = {}
        for m in posets[a].linearization:
            u = cat.comp[g][m]
            if not s.s_in_r(u):
                continue
            n = s.m_part(u)
            s_u = s.s_part(u)
            grid[(n, m)] = f.mat(d.r_to_d[s_u])
        rows = []
        for n in posets[b].linearization:
            row = []
            for m in posets[a].linearization:
                blk = grid.get((n, m))
                if blk is None:
                    blk = QMat.zeros(width(n), width(m))
                row.append(blk)
            rows.append(row)
        if rows and rows[0]:
            mats[g] = block(rows)
        else:
            mats[g] = QMat.zeros(dims[b], dims[a])
    return AdditiveFunctor(cat, dims, mats)


def tilde_subspaces(km: KernelModule, t: AdditiveFunctor):
    """Per object, the intersection of the kernels of the retractions of its
    proper subobject classes, taken as one kernel of the stacked matrices."""
    s = km.structure
    cat = s.cat
    out = []
    for a in cat.objects():
        poset = s.sub_poset(a)
        mats = [t.mat(s.star[rep]) for rep in poset.proper()]
        if not mats:
            out.append(Subspace.full(t.dims[a]))
        else:
            out.append(block([[m] for m in mats]).kernel())
    return out


def tilde(km: KernelModule, t: AdditiveFunctor, subspaces=None) -> PointedFunctor:
    """Right transport: kernel intersections, with action by restriction.

    A restriction failure means the input is not actually functorial for
    the structure and is raised with a witness, never patched over.
    """
    s = km.structure
    cat = s.cat
    d = km.d
    if subspaces is None:
        subspaces = tilde_subspaces(km, t)
    dims = [v.dim for v in subspaces]
    mats = {}
    for dr in d.nonzero_morphisms():
        r = d.d_to_r[dr]
        a, b = cat.dom[r], cat.cod[r]
        try:
            mats[dr] = restrict(t.mat(r), subspaces[a], subspaces[b])
        except RestrictionError as e:
            raise TransportError(
                f"restriction failed along {cat.mor_labels[r]}: {e}",
                witness={"morphism": r, "label": cat.mor_labels[r]},
            ) from e
    return PointedFunctor(d, dims, mats)


def unit(km: KernelModule, f: PointedFunctor, validate=True) -> NatTransform:
    """f => tilde(hat(f)): the inclusion into the whole-object summand,
    corestricted to the kernel intersection."""
    t = hat(km, f)
    return unit_with(km, f, t, validate=validate)[0]


def unit_with(km: KernelModule, f: PointedFunctor, t: AdditiveFunctor,
              subspaces=None, validate=True):
    s = km.structure
    cat = s.cat
    if subspaces is None:
        subspaces = tilde_subspaces(km, t)
    ft = tilde(km, t, subspaces)
    comps = []
    for a in cat.objects():
        poset = s.sub_poset(a)
        offs, total = _offsets(poset, lambda rep: f.dims[cat.dom[rep]])
        top = poset.top()
        off, w = offs[top]
        rows = [[0] * w for _ in range(total)]
        for i in range(w):
            rows[off + i][i] = 1
        inj = QMat.from_rows(rows, w)
        if not subspaces[a].contains_columns(inj):
            raise TransportError(
                "whole-object inclusion does not land in the kernel "
                f"intersection at object {a}",
                witness={"object": a},
            )
        comps.append(solve_exact(subspaces[a].basis, inj))
    out = NatTransform(f, ft, comps)
    if validate:
        rep = out.validate()
        if not rep.ok:
            raise TransportError(
                "unit is not natural", witness=rep.to_jsonable()
            )
    return out, ft


def counit(km: KernelModule, t: AdditiveFunctor, validate=True) -> NatTransform:
    """hat(tilde(t)) => t: on the summand of a subobject class, the subobject
    followed by the kernel-intersection inclusion."""
    return counit_with(km, t, validate=validate)[0]


def counit_with(km: KernelModule, t: AdditiveFunctor, subspaces=None,
                ft: PointedFunctor = None, validate=True):
    s = km.structure
    cat = s.cat
    if subspaces is None:
        subspaces = tilde_subspaces(km, t)
    if ft is None:
        ft = tilde(km, t, subspaces)
    hft = hat(km, ft)
    comps = []
    for b in cat.objects():
        poset = s.sub_poset(b)
        cols = []
        for rep in poset.linearization:
            a = cat.dom[rep]
            cols.append(t.mat(rep).mul(subspaces[a].basis))
        if cols:
            comps.append(block([cols]))
        else:
            comps.append(QMat.zeros(t.dims[b], 0))
    out = NatTransform(hft, t, comps)
    if validate:
        rep = out.validate()
        if not rep.ok:
            raise TransportError(
                "counit is not natural", witness=rep.to_jsonable()
            )
    return out, ft, hft


def hat_nat(km: KernelModule, alpha: NatTransform,
            source: AdditiveFunctor, target: AdditiveFunctor) -> NatTransform:
    """Blockwise application of hat to a transform of pointed functors."""
    s = km.structure
    cat = s.cat
    comps = []
    for b in cat.objects():
        poset = s.sub_poset(b)
        blocks = [alpha.component(cat.dom[rep]) for rep in poset.linearization]
        if blocks:
            comps.append(direct_sum(*blocks))
        else:
            comps.append(QMat.zeros(0, 0))
    return NatTransform(source, target, comps)


def tilde_nat(km: KernelModule, beta: NatTransform,
              source: PointedFunctor, target: PointedFunctor,
              sub_src, sub_tgt) -> NatTransform:
    """Restriction of a transform of ordinary functors to the kernel
    intersections."""
    comps = []
    for a in range(km.structure.cat.n_objects):
        comps.append(restrict(beta.component(a), sub_src[a], sub_tgt[a]))
    return NatTransform(source, target, comps)


# -- triangular comparison ----------------------------------------------------


def theta_matrix(km: KernelModule, t: AdditiveFunctor, a) -> QMat:
    """Coproduct-to-product comparison at the object a for a functor with
    values on the embeddings: block (row V, column U) is t of
    star(n_V) o m_U when that composite is an embedding, else zero.

    Blocks are indexed by the subobject linearization, whole object first,
    which makes the matrix block upper-triangular with identity diagonal;
    a violation raises TriangularityError.
    """
    s = km.structure
    cat = s.cat
    poset = s.sub_poset(a)
    order = list(reversed(poset.linearization))
    width = {rep: t.dims[cat.dom[rep]] for rep in order}
    rows = []
    for i, n in enumerate(order):
        row = []
        for j, m in enumerate(order):
            comp = cat.comp[s.star[n]][m]
            if comp in s.m_class:
                blk = t.mat(comp)
            else:
                blk = QMat.zeros(width[n], width[m])
            if i == j and not blk.is_identity():
                raise TriangularityError(
                    f"diagonal block at class {n} of object {a} is not the identity",
                    witness={"object": a, "n": n, "m": m},
                )
            if i > j and not blk.is_zero():
                raise TriangularityError(
                    f"block below the diagonal at ({n}, {m}) of object {a} "
                    "is nonzero",
                    witness={"object": a, "n": n, "m": m},
                )
            row.append(blk)
        rows.append(row)
    if not rows:
        return QMat.zeros(0, 0)
    return block(rows)


# -- certification ---------------------------------------------------------------


@dataclass
class CertificateEntry:
    name: str
    dims: list
    hat_dims: list
    tilde_hat_dims: list
    unit_natural: bool
    unit_invertible: bool
    counit_natural: bool
    counit_invertible: bool
    triangle_hat: bool
    triangle_tilde: bool
    witness: object = None

    @property
    def ok(self):
        return (
            self.unit_natural
            and self.unit_invertible
            and self.counit_natural
            and self.counit_invertible
            and self.triangle_hat
            and self.triangle_tilde
            and self.dims == self.tilde_hat_dims
        )

    def to_jsonable(self):
        return {
            "name": self.name,
            "dims": self.dims,
            "hat_dims": self.hat_dims,
            "tilde_hat_dims": self.tilde_hat_dims,
            "unit_natural": self.unit_natural,
            "unit_invertible": self.unit_invertible,
            "counit_natural": self.counit_natural,
            "counit_invertible": self.counit_invertible,
            "triangle_hat": self.triangle_hat,
            "triangle_tilde": self.triangle_tilde,
            "roundtrip_dims_equal": self.dims == self.tilde_hat_dims,
            "ok": self.ok,
            "witness": self.witness,
        }


@dataclass
class EquivalenceCertificate:
    entries: list = field(default_factory=list)

    @property
    def ok(self):
        return all(e.ok for e in self.entries)

    def first_failure(self):
        for e in self.entries:
            if not e.ok:
                return e
        return None

    def to_jsonable(self):
        return {"entries": [e.to_jsonable() for e in self.entries], "ok": self.ok}

    def to_json(self):
        return json.dumps(self.to_jsonable(), sort_keys=True, indent=2)


def certify_functor(km: KernelModule, f: PointedFunctor, name) -> CertificateEntry:
    """Both roundtrips and both triangle identities for one pointed functor
    and its left transport."""
    cat = km.structure.cat
    witness = None
    t = hat(km, f)
    sub_t = tilde_subspaces(km, t)
    try:
        eta, ft = unit_with(km, f, t, sub_t, validate=False)
        eta_rep = eta.validate()
        unit_natural = eta_rep.ok
        if not unit_natural:
            witness = {"unit": eta_rep.to_jsonable()["law"][:1]}
        unit_invertible = eta.is_iso()
        eps, ft2, hft = counit_with(km, t, sub_t, ft, validate=False)
        eps_rep = eps.validate()
        counit_natural = eps_rep.ok
        if not counit_natural and witness is None:
            witness = {"counit": eps_rep.to_jsonable()["law"][:1]}
        counit_invertible = eps.is_iso()

        # (counit at hat f) o (hat of unit) must be the identity of hat f
        hat_eta = hat_nat(km, eta, t, hft)
        tri_hat = all(
            eps.component(b).mul(hat_eta.component(b)).is_identity()
            for b in cat.objects()
        )
        # (tilde of counit) o (unit at tilde hat f) must be the identity
        sub_hft = tilde_subspaces(km, hft)
        eta_ft, t_hft = unit_with(km, ft, hft, sub_hft, validate=False)
        tilde_eps = tilde_nat(km, eps, t_hft, ft, sub_hft, sub_t)
        tri_tilde = all(
            tilde_eps.component(a).mul(eta_ft.component(a)).is_identity()
            for a in cat.objects()
        )
    except TransportError as e:
        return CertificateEntry(
            name, list(f.dims), list(t.dims), [], False, False, False, False,
            False, False, witness={"error": str(e), "detail": e.witness},
        )
    return CertificateEntry(
        name,
        list(f.dims),
        list(t.dims),
        list(ft.dims),
        unit_natural,
        unit_invertible,
        counit_natural,
        counit_invertible,
        tri_hat,
        tri_tilde,
        witness,
    )


def certify_equivalence(km: KernelModule, pointed_functors,
                        names=None) -> EquivalenceCertificate:
    """Certificate over a family of test functors; an empty family yields a
    vacuous (passing) certificate."""
    cert = EquivalenceCertificate()
    for i, f in enumerate(pointed_functors):
        name = names[i] if names else f"functor_{i}"
        cert.entries.append(certify_functor(km, f, name))
    return cert
