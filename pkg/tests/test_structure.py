import random
from math import comb

import pytest

from dkequiv.builders import build_cube, build_delta_bt, build_fi_sharp, build_pt
from dkequiv.structure import (
    MRStructure,
    build_d_cat,
    check_assumptions,
    idempotent_ordering,
    restricted_to_k,
    verify_coend_bijections,
)


def naive_r_class(s):
    """Direct triple search: irreducible means every m o x o star(n)
    decomposition has invertible embedding parts."""
    cat = s.cat
    isos = cat.isos()
    bad = set()
    for m in sorted(s.m_class):
        for n in sorted(s.m_class):
            sn = s.star[n]
            for x in cat.morphisms():
                if cat.dom[x] != cat.dom[n] or cat.cod[x] != cat.dom[m]:
                    continue
                if m in isos and n in isos:
                    continue
                bad.add(cat.comp[m][cat.comp[x][sn]])
    return frozenset(cat.morphisms()) - bad


@pytest.mark.parametrize(
    "builder", [build_pt, lambda: build_delta_bt(3), lambda: build_fi_sharp(2),
                lambda: build_cube(1)]
)
def test_r_class_matches_naive_search(builder):
    s = builder()
    assert s.r_class == naive_r_class(s)


def _decode(cat, f):
    lab = cat.mor_labels[f]
    return tuple(int(x) for x in lab.split(",")) if lab and lab != "()" else ()


def test_r_class_delta_is_identities_and_collapses(delta5):
    cat = delta5.cat
    expected = set()
    for f in cat.morphisms():
        t = _decode(cat, f)
        d, c = cat.dom[f], cat.cod[f]
        if d == c and t == tuple(range(d + 1)):
            expected.add(f)  # identity
        elif d == c + 1 and t == (0,) + tuple(range(c + 1)):
            expected.add(f)  # the collapse map hitting 0 twice
    assert set(delta5.r_class) == expected


def test_r_class_fi_is_bijections(fi4):
    cat = fi4.cat
    expected = {
        f
        for f in cat.morphisms()
        if cat.dom[f] == cat.cod[f]
        and all(x != 0 for x in _decode(cat, f))
    }
    assert set(fi4.r_class) == expected


def test_r_class_cube_is_top_reflecting_surjections(cube3):
    cat = cube3.cat
    expected = set()
    for f in cat.morphisms():
        t = _decode(cat, f)
        d, c = cat.dom[f], cat.cod[f]
        surjective = set(t) == set(range(c + 2))
        reflects_top = all(
            t[i] != c + 1 for i in range(d + 1)
        )  # only the top goes to the top
        if surjective and reflects_top:
            expected.add(f)
    assert set(cube3.r_class) == expected


def test_factorize_embeddings(delta4, fi3):
    for s in (delta4, fi3):
        cat = s.cat
        for m in sorted(s.m_class):
            fact = s.factorize(m)
            assert fact.m == cat.identity(cat.dom[m])
            assert fact.n == s.canonical_emb(m)
            if s.canonical_emb(m) == m:
                assert fact.r == cat.identity(cat.dom[m])
            # composite reproduces m
            got = cat.comp[cat.comp[fact.n][fact.r]][s.star[fact.m]]
            assert got == m


def test_factorize_delta_spec_cases(delta4):
    cat = delta4.cat
    by_label = {
        (cat.mor_labels[f], cat.dom[f], cat.cod[f]): f for f in cat.morphisms()
    }
    sigma1 = by_label[("0,1,1", 2, 1)]  # surjection hitting 1 twice: a retraction
    fact = delta4.factorize(sigma1)
    assert fact.n == cat.identity(1) and fact.r == cat.identity(1)
    assert cat.mor_labels[fact.m] == "0,2"  # its section skips the middle
    sigma0 = by_label[("0,0,1", 2, 1)]  # the collapse map: irreducible
    fact = delta4.factorize(sigma0)
    assert fact.n == cat.identity(1) and fact.m == cat.identity(2)
    assert fact.r == sigma0


def test_s_part_fi(fi3):
    cat = fi3.cat
    for u in cat.morphisms():
        t = _decode(cat, u)
        s_u = fi3.s_part(u)
        if all(x != 0 for x in t):
            # total injection: the non-embedding part is its bijective
            # corestriction onto the image
            assert fi3.s_in_r(u)
            st = _decode(cat, s_u)
            assert len(st) == len(t) and all(x != 0 for x in st)
            assert sorted(st) == list(range(1, len(t) + 1))
        if any(x == 0 for x in t) and any(x != 0 for x in t) or (
            t == () and cat.dom[u] > 0
        ):
            # strictly partial: the embedding part is non-invertible
            assert not fi3.s_in_r(u)


def test_s_part_composition_identity(delta4, fi3):
    # when both sides are defined, s(u o r) = s(u) o r for irreducible r
    for s in (delta4, fi3):
        cat = s.cat
        for u in cat.morphisms():
            if not s.s_in_r(u):
                continue
            for r in sorted(s.r_class):
                if cat.cod[r] != cat.dom[u]:
                    continue
                ur = cat.comp[u][r]
                if s.s_in_r(ur):
                    assert s.s_part(ur) == cat.comp[s.s_part(u)][r]


def test_r_class_invariant_under_isos(fi3):
    cat = fi3.cat
    isos = cat.isos()
    for r in sorted(fi3.r_class):
        for i in isos:
            if cat.composable(r, i):
                assert cat.comp[r][i] in fi3.r_class
            if cat.composable(i, r):
                assert cat.comp[i][r] in fi3.r_class


def test_sub_poset_fi_boolean(fi3):
    poset = fi3.sub_poset(3)
    assert len(poset) == 8  # subsets of a 3-set
    cat = fi3.cat
    # independent order oracle: image-subset containment
    def image(rep):
        return frozenset(x for x in _decode(cat, rep) if x != 0)

    for a in poset.elements:
        for b in poset.elements:
            assert poset.leq(a, b) == (image(a) <= image(b))
    assert len(poset.maximal_proper()) == 3
    assert poset.check() == []


def test_sub_poset_delta(delta4):
    poset = delta4.sub_poset(3)  # ordinal 4
    assert len(poset) == comb(2, 0) + comb(2, 1) + comb(2, 2)
    assert poset.check() == []
    assert len(delta4.sub_poset(0)) == 1  # ordinal 1: no proper parts


def test_d_cat_delta_chain(delta4):
    d = build_d_cat(delta4)
    cat = delta4.cat
    assert d.cat.check().ok  # associativity including zeros
    collapse = {
        f for f in sorted(delta4.r_class)
        if cat.dom[f] == cat.cod[f] + 1
    }
    for f in collapse:
        for g in collapse:
            if cat.composable(g, f):
                assert d.is_zero(d.cat.comp[d.r_to_d[g]][d.r_to_d[f]])


def test_d_cat_fi_groupoid(fi3):
    d = build_d_cat(fi3)
    assert d.cat.check().ok
    # bijections compose to bijections: never zero among nonzeros
    for g in d.nonzero_morphisms():
        for f in d.nonzero_morphisms():
            if d.cat.composable(g, f):
                assert not d.is_zero(d.cat.comp[g][f])
    # one nonzero block of size k! per size
    for k in range(4):
        assert len(
            [f for f in d.nonzero_morphisms()
             if d.cat.dom[f] == k and d.cat.cod[f] == k]
        ) == [1, 1, 2, 6][k]


def test_d_cat_pt_identities_and_zeros(pt):
    d = build_d_cat(pt)
    assert d.n_nonzero == 2
    assert d.cat.check().ok


def test_d_cat_cube_semisimplicial(cube2):
    # zero completion of the cube shape: one nonzero block per pair of
    # levels, counted like injections the other way around
    d = build_d_cat(cube2)
    assert d.cat.check().ok
    for k in range(3):
        for h in range(3):
            nz = [
                f for f in d.nonzero_morphisms()
                if d.cat.dom[f] == k and d.cat.cod[f] == h
            ]
            assert len(nz) == comb(k, h)


def test_assumptions_pass_on_builders(pt, delta4, fi3, cube2):
    for s in (pt, delta4, fi3, cube2):
        rep = check_assumptions(s)
        assert rep.passed, rep.to_jsonable()


def test_corrupted_star_reported_structurally(delta4):
    cat = delta4.cat
    star = dict(delta4.star)
    # break star(m) o m = id for some non-identity embedding
    m, bad = next(
        (m, g)
        for m in sorted(delta4.m_class)
        if not cat.is_identity(m)
        for g in cat.hom(cat.cod[m], cat.dom[m])
        if cat.comp[g][m] != cat.identity(cat.dom[m])
    )
    star[m] = bad
    broken = MRStructure(cat, delta4.m_class, star)
    rep = check_assumptions(broken)
    assert not rep.passed
    assert rep.structural.structural  # reported before the axiom checks
    assert rep.checks == []


def test_idempotent_ordering_fi(fi3):
    cat = fi3.cat
    order = idempotent_ordering(fi3, 3)
    assert order is not None and len(order) == 3
    cs = [cat.comp[m][fi3.star[m]] for m in order]
    for j in range(3):
        for i in range(j):
            assert cat.comp[cs[j]][cat.comp[cs[i]][cs[j]]] == cat.comp[cs[j]][cs[i]]


def test_idempotent_ordering_trivial_and_delta(pt, delta4):
    assert idempotent_ordering(pt, 0) == []
    assert idempotent_ordering(pt, 1) is not None  # single maximal proper part
    for a in delta4.cat.objects():
        assert idempotent_ordering(delta4, a) is not None


def test_idempotent_ordering_cap(fi3):
    with pytest.raises(ValueError):
        idempotent_ordering(fi3, 3, cap=2)


def test_coend_bijections_small(pt, delta4):
    # terminal category: both comparisons relate one-element pointed sets
    terminal = build_delta_bt(1)
    rep = verify_coend_bijections(terminal)
    assert rep.ok
    assert rep.lookup("right", 0, 0).class_count == 1
    assert rep.lookup("left", 0, 0).class_count == 1
    for s in (pt, delta4):
        rep = verify_coend_bijections(s)
        assert rep.ok


def test_coend_bijections_fi3_counts(fi3):
    rep = verify_coend_bijections(fi3)
    assert rep.ok
    entry = rep.lookup("right", 2, 3)
    assert entry.class_count == 6 and entry.target_count == 6
    for e in rep.entries:
        assert e.class_count == e.target_count


def test_restricted_structure_has_iso_irreducibles(fi3, delta4, cube2):
    # restricting to embedding-after-retraction composites collapses the
    # irreducible class to the isomorphisms
    for s in (fi3, delta4, cube2):
        red, mapping = restricted_to_k(s)
        assert red.validate().ok
        assert red.cat.check().ok
        assert red.r_class == red.cat.isos()
        rep = check_assumptions(red)
        assert rep.passed


def test_proposition_sandwich_exhaustive(delta4, fi3):
    # composite of retracted forms equal to embedding-after-irreducible
    # forces both factors irreducible
    for s in (delta4, fi3):
        cat = s.cat
        der = s.derived()
        mr = set()
        for m in sorted(s.m_class):
            for r in sorted(der.r_class):
                if cat.cod[r] == cat.dom[m]:
                    mr.add(cat.comp[m][r])
        for u in sorted(der.s_class):
            for t in sorted(der.s_class):
                if cat.cod[u] != cat.dom[t]:
                    continue
                if cat.comp[t][u] in mr:
                    assert u in der.r_class and t in der.r_class


def test_proposition_two_step_exhaustive(delta4, fi3):
    # if the irreducible part of v o u is irreducible then so is u's; when u
    # is also of retracted form, u itself and v's part are irreducible
    for s in (delta4, fi3):
        cat = s.cat
        der = s.derived()
        for u in cat.morphisms():
            for v in cat.morphisms_from(cat.cod[u]):
                vu = cat.comp[v][u]
                if s.s_in_r(vu):
                    assert s.s_in_r(u)
                    if u in der.s_class:
                        assert u in der.r_class
                        assert s.s_in_r(v)


def seeded_mutations(s, n, seed):
    """Deterministic stream of genuinely law-breaking mutations."""
    cat = s.cat
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        kind = rng.choice(["comp", "star"])
        if kind == "comp":
            f = rng.randrange(cat.n_morphisms)
            i = cat.identity(cat.cod[f])
            alt = [
                g for g in cat.hom(cat.dom[f], cat.cod[f]) if g != f
            ]
            if not alt:
                continue
            comp = [list(row) for row in cat.comp]
            comp[i][f] = rng.choice(alt)  # break id o f = f
            out.append(("comp", FinCatMutation(cat, comp, s)))
        else:
            ms = [m for m in sorted(s.m_class) if not cat.is_identity(m)]
            if not ms:
                continue
            m = rng.choice(ms)
            bad = [
                g
                for g in cat.hom(cat.cod[m], cat.dom[m])
                if cat.comp[g][m] != cat.identity(cat.dom[m])
            ]
            if not bad:
                continue
            star = dict(s.star)
            star[m] = rng.choice(bad)
            out.append(("star", MRStructure(cat, s.m_class, star)))
    return out


class FinCatMutation:
    def __init__(self, cat, comp, s):
        from dkequiv.fincat import FinCat

        self.cat = FinCat(
            cat.n_objects, cat.dom, cat.cod, cat.identities, comp,
            cat.obj_labels, cat.mor_labels,
        )
        self.s = s


def test_structure_json_round_trip(delta4, fi2):
    for s in (delta4, fi2):
        text = s.to_json()
        again = MRStructure.from_json(text)
        assert again.to_json() == text
        assert again.m_class == s.m_class and again.star == s.star
        assert again.r_class == s.r_class
    import json

    data = json.loads(delta4.to_json())
    assert all(
        isinstance(k, str) and isinstance(v, str)
        for k, v in data["star"].items()
    )


def test_mutation_detection(delta4, fi2):
    detected = 0
    total = 0
    for s in (delta4, fi2):
        for kind, mut in seeded_mutations(s, 5, seed=42):
            total += 1
            if kind == "comp":
                rep = mut.cat.check()
                assert not rep.ok and (rep.law or rep.structural)
                detected += 1
            else:
                rep = mut.validate()
                assert not rep.ok and rep.structural
                detected += 1
    assert detected == total == 10
