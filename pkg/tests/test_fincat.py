import json

import pytest

from dkequiv.builders import partial_injections
from dkequiv.fincat import FinCat, FinCatError


def terminal_cat():
    return FinCat(1, [0], [0], [0], [[0]], ["*"], ["id"])


def arrow_cat():
    # two objects, one arrow 0 -> 1
    return FinCat(
        2,
        [0, 1, 0],
        [0, 1, 1],
        [0, 1],
        [[0, None, None], [None, 1, 2], [None, None, None]],
        ["a", "b"],
        ["id_a", "id_b", "f"],
    )


def test_terminal_category():
    c = terminal_cat()
    assert c.check().ok
    assert c.isos() == {0}
    assert c.hom(0, 0) == [0]


def test_arrow_category():
    c = arrow_cat()
    # comp[f][id_a] missing above: structural error expected
    rep = c.check()
    assert not rep.ok and rep.structural


def test_arrow_category_fixed():
    c = FinCat(
        2,
        [0, 1, 0],
        [0, 1, 1],
        [0, 1],
        [[0, None, None], [None, 1, 2], [2, None, None]],
        ["a", "b"],
        ["id_a", "id_b", "f"],
    )
    assert c.check().ok
    assert c.isos() == {0, 1}
    op = c.opposite()
    assert op.check().ok
    assert op.dom[2] == 1 and op.cod[2] == 0
    opop = op.opposite()
    assert opop.comp == c.comp and opop.dom == c.dom


def test_identity_law_violation_named():
    # comp[f][id] deliberately wrong: the report names the offending instance
    c = FinCat(
        1,
        [0, 0],
        [0, 0],
        [0],
        [[0, 1], [0, 1]],
        ["*"],
        ["id", "f"],
    )
    rep = c.check()
    assert not rep.ok
    assert any(v.get("f") == 1 and "id" in v["message"] for v in rep.law)


def test_compose_raises_on_mismatch():
    c = arrow_cat()
    with pytest.raises(FinCatError):
        c.compose(2, 2)  # f o f undefined: cod f = 1 != dom f = 0


def hom_count_delta(m, n):
    # monotone endpoint-preserving maps counted by stars and bars
    from math import comb

    if m == 1 or n == 1:
        return 1 if (m == 1) == (n == 1) else (1 if n == 1 else 0)
    return comb(m - 2 + n - 1, m - 2)


def hom_count_delta_normal_form(m, n):
    # count via surjection-then-injection normal forms
    from math import comb

    if m == 1 or n == 1:
        return hom_count_delta(m, n)
    return sum(
        comb(m - 1, j - 1) * comb(n - 2, j - 2) for j in range(2, min(m, n) + 1)
    )


def test_delta_hom_counts_two_formulas(delta4):
    cat = delta4.cat
    for d in range(4):
        for c in range(4):
            got = len(cat.hom(d, c))
            assert got == hom_count_delta(d + 1, c + 1)
            assert got == hom_count_delta_normal_form(d + 1, c + 1)
    assert len(cat.hom(1, 1)) == 1  # only the identity on the 2-chain


def test_delta_builder_composites_match_hand_composition(delta4):
    # recompute every composite directly from the map tuples in the labels
    cat = delta4.cat

    def tup(f):
        lab = cat.mor_labels[f]
        return tuple(int(x) for x in lab.split(",")) if lab != "()" else ()

    for g in cat.morphisms():
        for f in cat.morphisms():
            if cat.cod[f] != cat.dom[g]:
                assert cat.comp[g][f] is None
                continue
            want = tuple(tup(g)[x] for x in tup(f))
            assert tup(cat.comp[g][f]) == want


def test_fi_iso_characterization(fi3):
    cat = fi3.cat
    # independent characterization: total and bijective partial maps
    expected = set()
    for f in cat.morphisms():
        lab = cat.mor_labels[f]
        t = tuple(int(x) for x in lab.split(",")) if lab != "()" else ()
        d, c = cat.dom[f], cat.cod[f]
        if d == c and all(x != 0 for x in t) and len(set(t)) == d:
            expected.add(f)
    assert cat.isos() == expected


def test_fi_hom_count(fi3):
    assert len(fi3.cat.hom(2, 3)) == 13  # 1 + 6 + 6 partial injections
    assert len(partial_injections(2, 3)) == 13


def test_isos_closed_under_composition_and_inverse(fi3):
    cat = fi3.cat
    isos = cat.isos()
    for f in isos:
        assert cat.iso_inverse(f) in isos
        for g in isos:
            if cat.composable(g, f):
                assert cat.comp[g][f] in isos


def test_opposite_of_delta_passes_check(delta4):
    op = delta4.cat.opposite()
    assert op.check().ok
    assert op.opposite().comp == delta4.cat.comp


def test_json_round_trip_bit_exact(delta3, fi2):
    for s in (delta3, fi2):
        text = s.cat.to_json()
        again = FinCat.from_json(text)
        assert again.to_json() == text
        assert again.comp == s.cat.comp
        assert again.mor_labels == s.cat.mor_labels
    t = terminal_cat()
    assert FinCat.from_json(t.to_json()).to_json() == t.to_json()
    # -1 encodes undefined entries
    data = json.loads(t.to_json())
    assert data["comp"] == [[0]]


def test_generating_set_on_zero_completion(km_delta4):
    # on the zero completion of the ordinal category the non-decomposables
    # are exactly the collapse maps, one per level, and they generate
    d = km_delta4.d
    cat = d.cat
    gens = set(cat.generating_set())
    labels = {cat.mor_labels[g] for g in gens}
    assert labels == {"0,0", "0,0,1", "0,0,1,2"}
    reached = set(cat.identities) | gens
    reached |= {f for f in cat.morphisms() if d.is_zero(f)}
    changed = True
    while changed:
        changed = False
        for g in sorted(reached):
            for f in cat._hom_into(cat.dom[g]):
                if f in reached and cat.comp[g][f] not in reached:
                    reached.add(cat.comp[g][f])
                    changed = True
    assert reached == set(cat.morphisms())
