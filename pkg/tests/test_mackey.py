import random

import pytest

from bredonkit.cats import SubgroupEmbedding, inclusion_functor, orbit_category
from bredonkit.errors import (
    AxiomViolation,
    MismatchedParent,
    NotCohomological,
    NotNormal,
    ObjectMismatch,
    ResourceError,
)
from bredonkit.fmod import (
    CatModule,
    cokernel_module,
    constant_module,
    hom_over_category,
    nat_is_surjective,
    restrict_along,
    submodule_from_seeds,
)
from bredonkit.grp import Family, Group, SubgroupHandle, group_from_generators
from bredonkit.mackey import (
    GModule,
    MackeyFunctor,
    burnside_functor,
    coinvariance_functor,
    d_tower,
    dh_coinduction,
    equivariant_hom,
    fixed_point_cover,
    fixed_point_functor,
    gmodule_coinduce,
    gmodule_induce,
    inflation,
    mackey_coinduce,
    mackey_from_json,
    mackey_from_tables,
    mackey_induce,
    quotient_data,
    random_gmodule,
    xi,
)
from bredonkit.zmod import AbMap, FgAbelian, IntMatrix


def c2():
    return group_from_generators("(1 2)", name="C2")


def c4():
    return group_from_generators("(1 2 3 4)", name="C4")


def s3():
    return group_from_generators("(1 2), (1 2 3)", name="S3")


def d8():
    return group_from_generators("(1 2 3 4), (1 3)", name="D8")


def sub_of_order(group, order):
    for sid, members in enumerate(group.subgroups):
        if len(members) == order:
            return sid
    raise AssertionError(f"no subgroup of order {order}")


def values_by_object(mf):
    return {o: mf.module.values[o].invariant_factors
            for o in sorted(mf.module.values)}


# -- integer representations -------------------------------------------------


def test_regular_module_validates():
    reg = GModule.regular(s3())
    assert reg.validate()
    assert reg.value.invariant_factors == (0,) * 6


def test_module_rejects_inconsistent_generator_table():
    g = c4()
    fiber = FgAbelian.free(1)
    with pytest.raises(AxiomViolation):
        # order-4 generator acting by -1 squares to +1, not to the action
        # required of g^2 by the table below.
        GModule(g, fiber, {1: AbMap(fiber, fiber, IntMatrix([[-1]])),
                           2: AbMap(fiber, fiber, IntMatrix([[-1]]))})


def test_sign_module_fixed_points():
    g = s3()
    sign = GModule.one_dimensional(g, SubgroupHandle(g, sub_of_order(g, 3)))
    full, _ = sign.fixed_points(range(g.order))
    assert full.is_trivial()
    rot, _ = sign.fixed_points(g.subgroups[sub_of_order(g, 3)])
    assert rot.invariant_factors == (0,)


def test_direct_sum_and_restriction():
    g = s3()
    both = GModule.direct_sum([GModule.trivial(g), GModule.regular(g)])
    assert both.validate()
    emb = SubgroupEmbedding(g, SubgroupHandle(g, sub_of_order(g, 3)),
                            Family.all(g))
    small = both.restricted_to(emb)
    assert small.validate()
    # restricted regular S3 module = two copies of the regular C3 module
    assert small.value.invariant_factors == (0,) * 7


def test_permutation_module_matches_coset_count():
    g = d8()
    sid = sub_of_order(g, 2)
    perm = GModule.permutation(g, SubgroupHandle(g, sid))
    assert perm.validate()
    assert perm.value.ambient_rank == 4


def test_equivariant_hom_of_regular():
    g = s3()
    reg = GModule.regular(g)
    triv = GModule.trivial(g)
    # maps out of the regular module are free on the target's underlying group
    assert equivariant_hom(reg, reg).group.invariant_factors == (0,) * 6
    # maps from the trivial module into the regular one hit the norm line
    assert equivariant_hom(triv, reg).group.invariant_factors == (0,)


def test_random_gmodule_is_deterministic_and_valid():
    g = s3()
    one = random_gmodule(g, random.Random(11))
    two = random_gmodule(g, random.Random(11))
    assert one.validate()
    assert [one.action(x).matrix for x in range(g.order)] == \
        [two.action(x).matrix for x in range(g.order)]


# -- fixed points and coinvariants -------------------------------------------


def test_fixed_points_of_regular_c2():
    g = c2()
    m = fixed_point_functor(GModule.regular(g))
    top = g.subgroup_id([0, 1])
    assert m.value(0).invariant_factors == (0, 0)
    assert m.value(top).invariant_factors == (0,)
    # transfer then restriction multiplies the norm line by the index
    assert m.ind(0, top).compose(m.res(top, 0)).matrix.tolists() == [[2]]
    assert m.res(top, 0).compose(m.ind(0, top)).matrix.tolists() == [[1, 1], [1, 1]]


def test_coinvariants_of_regular_c2():
    g = c2()
    m = coinvariance_functor(GModule.regular(g))
    top = g.subgroup_id([0, 1])
    assert m.value(0).invariant_factors == (0, 0)
    assert m.value(top).invariant_factors == (0,)
    assert m.is_cohomological()


def test_fixed_point_functor_is_cohomological_s3():
    m = fixed_point_functor(GModule.regular(s3()))
    assert m.is_cohomological()


def test_conjugation_consistency_d8():
    g = d8()
    m = fixed_point_functor(GModule.regular(g), validate=False)
    h = sub_of_order(g, 2)
    for x in range(g.order):
        back = m.conj(g.inv[x], g.conj_subgroup(x, h)).compose(m.conj(x, h))
        assert back.equal_to(AbMap.identity(m.value(h)))


def test_accessors_reject_outside_family():
    g = s3()
    fam = Family(g, [0, g.class_of_subgroup(sub_of_order(g, 2))])
    m = fixed_point_functor(GModule.trivial(g), family=fam)
    with pytest.raises(ObjectMismatch):
        m.value(sub_of_order(g, 3))
    with pytest.raises(ObjectMismatch):
        m.res(sub_of_order(g, 6), 0)


# -- tables -------------------------------------------------------------------


def burnside_tables(g):
    top = g.subgroup_id([0, 1])
    return {
        "group": g,
        "values": {0: [0], top: [0, 0]},
        "res": {(top, 0): [[1, 2]]},
        "ind": {(0, top): [[0], [1]]},
        "conj": {(1, 0): [[1]]},
    }


def test_tables_reconstruct_burnside_c2():
    g = c2()
    m = mackey_from_tables(burnside_tables(g))
    b = burnside_functor(g)
    top = g.subgroup_id([0, 1])
    assert m.value(top).invariant_factors == (0, 0)
    assert m.res(top, 0).matrix == b.res(top, 0).matrix
    assert m.ind(0, top).matrix == b.ind(0, top).matrix
    assert not m.is_cohomological()


def test_tables_with_identity_operations_violate_axioms():
    g = c2()
    top = g.subgroup_id([0, 1])
    data = {
        "group": g,
        "values": {0: [0], top: [0]},
        "res": {(top, 0): [[1]]},
        "ind": {(0, top): [[1]]},
        "conj": {(1, 0): [[1]]},
    }
    # composing down and back up must count both cosets; identity tables
    # cannot satisfy the composition law.
    with pytest.raises(AxiomViolation):
        mackey_from_tables(data)


def test_tables_missing_entry():
    g = c2()
    data = burnside_tables(g)
    del data["conj"]
    with pytest.raises(AxiomViolation):
        mackey_from_tables(data)


def test_tables_transitivity_closure_c4():
    g = c4()
    e, half, full = 0, sub_of_order(g, 2), sub_of_order(g, 4)
    m = fixed_point_functor(GModule.regular(g))
    data = {
        "group": g,
        "values": {e: [0] * 4, half: [0] * 2, full: [0]},
        # only adjacent steps given; the long maps come from transitivity
        "res": {(half, e): m.res(half, e), (full, half): m.res(full, half)},
        "ind": {(e, half): m.ind(e, half), (half, full): m.ind(half, full)},
        "conj": {(1, e): m.conj(1, e), (1, half): m.conj(1, half),
                 (1, full): m.conj(1, full)},
    }
    rebuilt = mackey_from_tables(data)
    assert rebuilt.res(full, e).matrix == m.res(full, e).matrix
    assert rebuilt.ind(e, full).matrix == m.ind(e, full).matrix


# -- induction, coinduction, inflation ----------------------------------------


def test_induction_double_coset_values_c3_in_s3():
    g = s3()
    emb = SubgroupEmbedding(g, SubgroupHandle(g, sub_of_order(g, 3)),
                            Family.all(g))
    nf = fixed_point_functor(GModule.regular(emb.subgroup))
    up = mackey_induce(emb, nf)
    up.module.validate()
    # one double coset at each level except the bottom, which splits in two
    assert values_by_object(up) == {0: (0,) * 6, 1: (0,) * 3,
                                    2: (0, 0), 3: (0,)}


def test_induction_double_coset_values_c2_in_s3():
    g = s3()
    emb = SubgroupEmbedding(g, SubgroupHandle(g, sub_of_order(g, 2)),
                            Family.all(g))
    nf = fixed_point_functor(GModule.regular(emb.subgroup))
    up = mackey_induce(emb, nf)
    # at the order-2 level: one double coset meeting N fully, one freely,
    # so the value is M(N/N) + M(N/e)
    assert up.module.values[1].invariant_factors == (0, 0, 0)


def test_induction_matches_coinduction_s3():
    g = s3()
    for order in (2, 3):
        emb = SubgroupEmbedding(g, SubgroupHandle(g, sub_of_order(g, order)),
                                Family.all(g))
        nf = fixed_point_functor(GModule.regular(emb.subgroup))
        assert values_by_object(mackey_induce(emb, nf)) == \
            values_by_object(mackey_coinduce(emb, nf))


def test_coinduction_compatible_with_group_module_coinduction():
    g = s3()
    emb = SubgroupEmbedding(g, SubgroupHandle(g, sub_of_order(g, 3)),
                            Family.all(g))
    nmod = GModule.regular(emb.subgroup)
    upstairs = fixed_point_functor(gmodule_coinduce(emb, nmod))
    direct = mackey_coinduce(emb, fixed_point_functor(nmod))
    assert values_by_object(upstairs) == values_by_object(direct)


def test_gmodule_induce_coinduce_c4_in_d8():
    g = d8()
    # the cyclic subgroup of order 4 contains an element of order 4
    c4_id = next(i for i, m in enumerate(g.subgroups)
                 if len(m) == 4 and any(
                     g.mul(x, x) != 0 and g.mul(g.mul(x, x), g.mul(x, x)) == 0
                     for x in m))
    emb = SubgroupEmbedding(g, SubgroupHandle(g, c4_id), Family.all(g))
    sub = emb.subgroup
    rot = next(i for i in range(1, sub.order) if sub.mul(i, i) != 0)
    sign = GModule.one_dimensional(
        sub, SubgroupHandle(sub, sub.subgroup_id([0, sub.mul(rot, rot)])))
    gi = gmodule_induce(emb, sign)
    gc = gmodule_coinduce(emb, sign)
    assert gi.validate() and gc.validate()
    assert gi.value.ambient_rank == 2
    assert gc.value.ambient_rank == 2
    # an index-two coinduction agrees with induction up to isomorphism
    assert equivariant_hom(gi, gc).group.invariant_factors == \
        equivariant_hom(gi, gi).group.invariant_factors


def test_mackey_induce_rejects_foreign_functor():
    g = s3()
    emb = SubgroupEmbedding(g, SubgroupHandle(g, sub_of_order(g, 3)),
                            Family.all(g))
    with pytest.raises(ObjectMismatch):
        mackey_induce(emb, fixed_point_functor(GModule.trivial(c2())))


def test_induction_adjoint_to_restriction_rank():
    g = s3()
    emb = SubgroupEmbedding(g, SubgroupHandle(g, sub_of_order(g, 3)),
                            Family.all(g))
    nf = fixed_point_functor(GModule.trivial(emb.subgroup))
    gf = burnside_functor(g)
    functor = inclusion_functor(emb, nf.category, gf.category)
    up = mackey_induce(emb, nf)
    left = hom_over_category(up.module, gf.module)
    right = hom_over_category(nf.module, restrict_along(functor, gf.module))
    assert left.group.invariant_factors == right.group.invariant_factors


def test_inflation_c4_mod_half():
    g = c4()
    half = SubgroupHandle(g, sub_of_order(g, 2))
    q = quotient_data(g, half).group
    infl = inflation(g, half, fixed_point_functor(GModule.trivial(q)))
    vals = [infl.value(sid).invariant_factors
            for sid in range(len(g.subgroups))]
    assert vals == [(), (0,), (0,)]
    # operations through the kernel are identities for a constant source
    assert infl.res(sub_of_order(g, 4), sub_of_order(g, 2)).matrix.tolists() \
        == [[1]]


def test_inflation_requires_normal_subgroup():
    g = s3()
    with pytest.raises(NotNormal):
        quotient_data(g, SubgroupHandle(g, sub_of_order(g, 2)))


def test_inflation_rejects_wrong_quotient_group():
    g = c4()
    half = SubgroupHandle(g, sub_of_order(g, 2))
    quotient_data(g, half)
    other = c2()
    with pytest.raises(ObjectMismatch):
        inflation(g, half, fixed_point_functor(GModule.trivial(other)))


# -- covers -------------------------------------------------------------------


def test_cover_of_coinvariance_s3():
    mf = coinvariance_functor(GModule.regular(s3()))
    source, tau = fixed_point_cover(mf)
    assert tau.check_natural()
    assert nat_is_surjective(tau)
    assert source.is_cohomological()


def test_cover_of_permutation_coinvariance_d8():
    g = d8()
    for order in (2, 4, 8):
        sid = sub_of_order(g, order)
        perm = GModule.permutation(g, SubgroupHandle(g, sid))
        mf = coinvariance_functor(perm, validate=False)
        _, tau = fixed_point_cover(mf)
        assert nat_is_surjective(tau)


def test_cover_refuses_burnside():
    with pytest.raises(NotCohomological):
        fixed_point_cover(burnside_functor(s3()))


def test_submodule_of_cohomological_is_cohomological():
    g = c2()
    mf = fixed_point_functor(GModule.regular(g))
    top_obj = mf.category.object_count() - 1
    sub, incl = submodule_from_seeds(mf.module, {top_obj: [[2]]})
    assert MackeyFunctor(mf.category, sub).is_cohomological()
    quo, _ = cokernel_module(incl)
    assert MackeyFunctor(mf.category, quo, check=False).is_cohomological()


def test_conjugate_seeds_generate_matching_submodules():
    g = s3()
    mf = fixed_point_functor(GModule.regular(g))
    e_obj = 0
    seed = [1, 0, 0, 0, 0, 0]
    moved = mf.conj(1, 0).matrix.apply(seed)
    one, _ = submodule_from_seeds(mf.module, {e_obj: [seed]})
    two, _ = submodule_from_seeds(mf.module, {e_obj: [moved]})
    for obj in range(mf.category.object_count()):
        assert one.values[obj].invariant_factors == \
            two.values[obj].invariant_factors


# -- single-class coinduction and the tower -----------------------------------


def test_single_class_coinduction_of_constant_s3():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    m = constant_module(cat)
    de = dh_coinduction(m, cat.objects[0])
    assert all(v.invariant_factors == (0,) for v in de.values.values())
    de.validate()


def test_coinduction_off_top_class_restores_module():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    top_obj = cat.object_count() - 1
    values = {o: FgAbelian.free(1) if o == top_obj else FgAbelian.zero()
              for o in range(cat.object_count())}
    actions = {}
    for (a, b), basis in cat.hom_basis.items():
        for j in range(len(basis)):
            mat = IntMatrix.identity(1) if a == b == top_obj else \
                IntMatrix.zeros(values[a].ambient_rank,
                                values[b].ambient_rank)
            actions[(a, b, j)] = AbMap(values[b], values[a], mat)
    ts = CatModule(cat, values, actions)
    ts.validate()
    report = d_tower(ts, 0)
    stage = report.stages[0]
    assert stage.unit_injective
    assert stage.coker.is_zero()
    assert {o: v.invariant_factors for o, v in stage.dm.values.items()} == \
        {o: v.invariant_factors for o, v in ts.values.items()}


def test_tower_of_constant_module_s3():
    """Values along the tower over S3, checked against a hand computation."""
    g = s3()
    cat = orbit_category(g, Family.all(g))
    report = d_tower(constant_module(cat), 2)
    assert report.exact
    assert report.final_is_zero()
    assert report.xis == [0, 1, 2]
    by_stage = [{o: v.invariant_factors for o, v in sorted(s.module.values.items())}
                for s in report.stages]
    assert by_stage[0] == {0: (0,), 1: (0,), 2: (0,), 3: (0,)}
    assert by_stage[1] == {0: (), 1: (0,), 2: (0,), 3: (0, 0, 0)}
    assert by_stage[2] == {0: (), 1: (), 2: (), 3: (0, 0)}
    dm0 = {o: v.invariant_factors
           for o, v in sorted(report.stages[0].dm.values.items())}
    assert dm0 == {0: (0,), 1: (0, 0), 2: (0, 0), 3: (0,) * 4}


def test_tower_units_are_natural():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    report = d_tower(constant_module(cat), 0)
    assert report.stages[0].unit.check_natural()


def test_tower_depth_matches_group_length_c4():
    g = c4()
    cat = orbit_category(g, Family.all(g))
    report = d_tower(constant_module(cat), 2)
    assert report.final_is_zero()
    assert report.exact


def test_tower_resource_guard():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    with pytest.raises(ResourceError):
        d_tower(constant_module(cat), 2, rank_bound=2)


def test_xi_of_supported_modules():
    g = s3()
    cat = orbit_category(g, Family.all(g))
    assert xi(constant_module(cat)) == 0
    report = d_tower(constant_module(cat), 2)
    assert xi(report.stages[2].module) == 2
    assert xi(report.final) == float("inf")


# -- serialization ------------------------------------------------------------


def test_mackey_json_round_trip():
    g = c2()
    m = fixed_point_functor(GModule.regular(g))
    data = m.to_json()
    back = mackey_from_json(data)
    top = back.group.subgroup_id([0, 1])
    assert back.value(top).invariant_factors == (0,)
    assert back.ind(0, top).compose(back.res(top, 0)).matrix.tolists() == [[2]]
    assert back.to_json() == data


def test_summary_keys_are_class_ids():
    m = burnside_functor(c2())
    summary = m.summary()
    assert set(summary) == {0, 1}


# -- structural invariants ----------------------------------------------------


def test_evaluation_at_bottom_is_adjoint_to_fixed_points():
    # maps out of N evaluated at the free orbit match maps N -> fixed points
    g = c2()
    n = burnside_functor(g)
    v = GModule.regular(g)
    e_sid = g.trivial_handle().sub_id
    gen = g.generator_ids[0]
    n_at_e = GModule(g, n.value(e_sid), {gen: n.conj(gen, e_sid)})
    left = equivariant_hom(n_at_e, v).group
    right = hom_over_category(n.module, fixed_point_functor(v).module).group
    assert left.invariant_factors == right.invariant_factors == (0,)


def test_orbit_restriction_is_not_faithful():
    # two valid functors with the same restrictions but different transfers
    g = c2()
    e_sid = g.trivial_handle().sub_id
    top = g.full_handle().sub_id
    gen = g.generator_ids[0]
    tables = {
        "group": g,
        "values": {e_sid: [0], top: [0, 0]},
        "res": {(top, e_sid): [[2, 1]]},
        "ind": {(e_sid, top): [[1], [0]]},
        "conj": {(gen, e_sid): [[1]], (gen, top): [[1, 0], [0, 1]]},
    }
    variant = dict(tables, ind={(e_sid, top): [[0], [2]]})
    first = mackey_from_tables(tables)
    second = mackey_from_tables(variant)
    assert first.ind(e_sid, top).matrix.tolists() == [[1], [0]]
    assert second.ind(e_sid, top).matrix.tolists() == [[0], [2]]
    a, b = first.to_orbit_module(), second.to_orbit_module()
    assert a.category is b.category
    assert sorted(a.actions) == sorted(b.actions)
    for key in a.actions:
        assert a.actions[key].matrix.tolists() == b.actions[key].matrix.tolists()
