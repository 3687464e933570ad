import pytest

from bredonkit.cats import (
    OrbitMorphism,
    Span,
    combo_add,
    compose_spans,
    conjugation_functor,
    conjugator_to_rep,
    express_span,
    inclusion_functor,
    mackey_category,
    orbit_category,
    orbit_to_mackey,
    ric_decompose,
    SubgroupEmbedding,
)
from bredonkit.errors import ObjectMismatch
from bredonkit.grp import Family, group_from_generators, parse_cycles


def s3():
    return group_from_generators("(1 2), (1 2 3)", name="S3")


def c2():
    return group_from_generators("(1 2)", name="C2")


def d8():
    return group_from_generators("(1 2 3 4), (1 3)", name="D8")


def obj_of_order(cat, order):
    for i in range(cat.object_count()):
        if len(cat.group.subgroups[cat.rep_sub[i]]) == order:
            return i
    raise AssertionError(f"no object of subgroup order {order}")


def test_orbit_category_ranks_s3():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    e, h2 = obj_of_order(cat, 1), obj_of_order(cat, 2)
    assert cat.hom_rank(e, h2) == 3
    assert cat.hom_rank(h2, h2) == 1
    assert cat.hom_rank(h2, e) == 0  # no map down to a free orbit
    assert cat.hom_rank(e, e) == 6
    top = obj_of_order(cat, 6)
    assert cat.hom_rank(e, top) == 1
    assert cat.hom_rank(top, top) == 1


def test_orbit_category_axioms_s3():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    cat.check_identities()
    cat.check_associativity()


def test_mackey_rank_c2():
    g = c2()
    cat = mackey_category(g, Family.all(g))
    t = obj_of_order(cat, 2)
    assert cat.hom_rank(t, t) == 2


def test_mackey_rank_free_orbit():
    g = s3()
    cat = mackey_category(g, Family.all(g))
    e = obj_of_order(cat, 1)
    for i in range(cat.object_count()):
        index = g.order // len(g.subgroups[cat.rep_sub[i]])
        assert cat.hom_rank(e, i) == index
        assert cat.hom_rank(i, e) == index


def test_double_span_composition_c2():
    g = c2()
    cat = mackey_category(g, Family.all(g))
    t = obj_of_order(cat, 2)
    trivial_id = g.subgroup_id([0])
    sigma = Span(t, t, trivial_id, 0)
    combo = compose_spans(cat, sigma, sigma)
    idx = cat.index_of(t, t, cat.canonical_span(t, t, trivial_id, 0))
    assert combo == ((idx, 2),)


def test_mackey_category_axioms_s3():
    g = s3()
    cat = mackey_category(g, Family.all(g))
    cat.check_identities()
    cat.check_associativity()


def test_mackey_category_axioms_d8():
    g = d8()
    cat = mackey_category(g, Family.all(g))
    cat.check_identities()
    cat.check_associativity()


# -- independent pullback oracle for span composition ------------------------


def coset_space(group, sub_members):
    """Left cosets x*H as frozensets of element ids."""
    seen = {}
    order = []
    for x in range(group.order):
        c = frozenset(group.mul(x, h) for h in sub_members)
        if c not in seen:
            seen[c] = len(order)
            order.append(c)
    return order


def span_composition_oracle(cat, first, then):
    """Compose two basic spans by decomposing the literal pullback of G-sets.

    Works with raw cosets and orbits only; shares no code with the category's
    composition table.
    """
    g = cat.group
    subs = g.subgroups
    s_rep = cat.rep_sub[first.source]
    k_rep = cat.rep_sub[first.target]
    q_rep = cat.rep_sub[then.target]
    l_members, p_members = subs[first.middle], subs[then.middle]
    x_cosets = coset_space(g, l_members)
    y_cosets = coset_space(g, p_members)
    # Match condition: x * g1 * K == y * K, with legs evaluated honestly.
    pairs = []
    k_members = subs[k_rep]
    for xc in x_cosets:
        x = min(xc)
        xk = frozenset(g.mul(g.mul(x, first.twist), k) for k in k_members)
        for yc in y_cosets:
            y = min(yc)
            yk = frozenset(g.mul(y, k) for k in k_members)
            if xk == yk:
                pairs.append((xc, yc))
    # Decompose the pair set into diagonal G-orbits.
    remaining = set(pairs)
    combo = ()
    while remaining:
        xc, yc = min(remaining, key=lambda p: (sorted(p[0]), sorted(p[1])))
        orbit = set()
        for u in range(g.order):
            ux = frozenset(g.mul(u, a) for a in xc)
            uy = frozenset(g.mul(u, b) for b in yc)
            orbit.add((ux, uy))
        remaining -= orbit
        x, y = min(xc), min(yc)
        stab = frozenset(u for u in range(g.order)
                         if frozenset(g.mul(u, a) for a in xc) == xc
                         and frozenset(g.mul(u, b) for b in yc) == yc)
        middle = frozenset(g.conj(g.inv[x], t) for t in stab)
        twist = g.mul(g.mul(g.inv[x], y), then.twist)
        span = cat.canonical_span(first.source, then.target,
                                  g.subgroup_id(middle), twist)
        idx = cat.index_of(first.source, then.target, span)
        combo = combo_add(combo, ((idx, 1),))
    return combo


@pytest.mark.parametrize("maker", [c2, s3])
def test_composition_matches_pullback_oracle(maker):
    g = maker()
    cat = mackey_category(g, Family.all(g))
    n = cat.object_count()
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for f in cat.hom_basis[(a, b)]:
                    for s in cat.hom_basis[(b, c)]:
                        assert compose_spans(cat, f, s) == \
                            span_composition_oracle(cat, f, s)


def test_mackey_double_coset_identity_s3():
    # R_H^K I_L^K expands over double cosets H\K/L; both sides of the table.
    g = s3()
    cat = mackey_category(g, Family.all(g))
    subs = g.subgroups
    for bi in range(cat.object_count()):
        k_rep = cat.rep_sub[bi]
        inside = [sid for sid, mem in enumerate(subs) if mem <= subs[k_rep]]
        for h_id in inside:
            for l_id in inside:
                # restriction to H: abstract span H <- H -> K
                ai, _, r_span = express_span(cat, h_id, h_id, 0, k_rep)
                # induction from L: abstract span K <- L -> L
                _, ci, i_span = express_span(cat, k_rep, l_id, 0, l_id)
                lhs = compose_spans(cat, r_span, i_span)
                rhs = ()
                seen = set()
                for k in sorted(subs[k_rep]):
                    if k in seen:
                        continue
                    dc = {g.mul(g.mul(h, k), l)
                          for h in subs[h_id] for l in subs[l_id]}
                    seen |= dc
                    mid = subs[h_id] & frozenset(g.conj(k, l) for l in subs[l_id])
                    _, _, span = express_span(
                        cat, h_id, g.subgroup_id(mid), k, l_id)
                    rhs = combo_add(rhs, ((cat.index_of(ai, ci, span), 1),))
                assert lhs == rhs


def test_ric_decompose_words():
    g = s3()
    cat = mackey_category(g, Family.all(g))
    e, h2 = obj_of_order(cat, 1), obj_of_order(cat, 2)
    top = obj_of_order(cat, 6)
    # Identity span: empty word.
    ident = cat.hom_basis[(top, top)][cat.identity_index[top]]
    assert ric_decompose(cat, ident) == ()
    # Pure restriction: span cls(C2) <- C2 -> cls(S3).
    c2_id = cat.rep_sub[h2]
    r_span = Span(h2, top, c2_id, 0)
    word = ric_decompose(cat, r_span)
    assert [w.kind for w in word] == ["R"]
    # Pure induction: span cls(S3) <- C2 -> cls(C2).
    i_span = Span(top, h2, c2_id, 0)
    word = ric_decompose(cat, i_span)
    assert [w.kind for w in word] == ["I"]
    # A full span through the trivial subgroup from S3 to C2: I after R.
    triv = g.subgroup_id([0])
    span = Span(top, h2, triv, 0)
    word = ric_decompose(cat, span)
    assert [w.kind for w in word] == ["R", "I"]


def test_ric_decompose_with_twist():
    g = s3()
    cat = mackey_category(g, Family.all(g))
    h2 = obj_of_order(cat, 2)
    c2_id = cat.rep_sub[h2]
    # Conjugate C2 by a 3-cycle: a twisted endo-span of cls(C2).
    x = g.index(parse_cycles("(1 2 3)"))
    mid = g.conj_subgroup(x, c2_id)
    span = Span(h2, h2, mid, x)
    word = ric_decompose(cat, span)
    kinds = [w.kind for w in word]
    assert "c" in kinds
    # Factors compose types correctly: R from rep, c moves back, I embeds.
    assert kinds in (["c"], ["R", "c"], ["c", "I"], ["R", "c", "I"])


def test_orbit_to_mackey_functor():
    g = s3()
    fam = Family.all(g)
    orb = orbit_category(g, fam)
    mack = mackey_category(g, fam)
    pi = orbit_to_mackey(orb, mack)
    assert pi.check_functor()
    # The image of a coset map is a span with full middle.
    e, h2 = obj_of_order(orb, 1), obj_of_order(orb, 2)
    img = pi.apply(e, h2, ((0, 1),))
    assert len(img) == 1
    span = mack.hom_basis[(e, h2)][img[0][0]]
    assert span.middle == orb.rep_sub[e]


def test_inclusion_functor_both_flavors():
    g = s3()
    fam = Family.all(g)
    h = g.subgroup_handle([parse_cycles("e", 3), parse_cycles("(1 2)", 3)])
    emb = SubgroupEmbedding(g, h, fam)
    assert emb.subgroup.order == 2
    small_orb = orbit_category(emb.subgroup, emb.family)
    big_orb = orbit_category(g, fam)
    assert inclusion_functor(emb, small_orb, big_orb).check_functor()
    small_mack = mackey_category(emb.subgroup, emb.family)
    big_mack = mackey_category(g, fam)
    assert inclusion_functor(emb, small_mack, big_mack).check_functor()


def test_conjugation_functor_is_functor():
    g = s3()
    fam = Family.all(g)
    for cat in (orbit_category(g, fam), mackey_category(g, fam)):
        for x in range(g.order):
            assert conjugation_functor(cat, x).check_functor()


def test_zero_morphism_is_not_basis():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    h2, e = obj_of_order(cat, 2), obj_of_order(cat, 1)
    assert cat.hom_basis[(h2, e)] == []
    assert combo_add((), ()) == ()


def test_family_restriction_shrinks_categories():
    g = s3()
    cat = orbit_category(g, Family.trivial(g))
    assert cat.object_count() == 1
    assert cat.hom_rank(0, 0) == 6


def test_dump_shape():
    g = c2()
    cat = mackey_category(g, Family.all(g))
    data = cat.dump()
    assert data["flavor"] == "mackey"
    assert len(data["objects"]) == 2
    assert all(isinstance(v, list) for v in data["hom_bases"].values())
