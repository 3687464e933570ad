import json

import pytest

from bredonkit.bredon import (
    CoefficientSpec,
    CoefficientTable,
    EncodedClass,
    EncodedComplex,
    as_coefficient_spec,
    bredon_cohomology,
    bredon_cohomology_encoded,
    cached_resolution,
    coefficient_module,
    default_battery,
    dimension_report,
    finite_kernel_check,
    load_complex,
    pullback_family,
    shapiro_check,
    subgroup_embedding,
)
from bredonkit.catalog import catalog_complex, catalog_group
from bredonkit.cats import OrbitMorphism, orbit_category
from bredonkit.errors import (
    AxiomViolation,
    DegreeOutOfRange,
    FamilyError,
    IncompleteCoefficient,
    MismatchedParent,
    NotCohomological,
    ObjectMismatch,
    ParseError,
)
from bredonkit.fmod import ChainComplex, cohomology
from bredonkit.grp import Family, SubgroupHandle, group_from_generators
from bredonkit.mackey import (
    GModule,
    burnside_functor,
    fixed_point_functor,
    quotient_data,
)
from bredonkit.zmod import FgAbelian, IntMatrix


def handle_of_order(group, order):
    for sid, members in enumerate(group.subgroups):
        if len(members) == order:
            return SubgroupHandle(group, sid)
    raise AssertionError(f"no subgroup of order {order}")


def cyclic(m):
    cycle = "(" + " ".join(str(i) for i in range(1, m + 1)) + ")"
    return group_from_generators([cycle], name=f"C{m}")


def periodic_resolution(group, length):
    """The hand-built resolution of Z over Z[C_m]: alternating t-1 and norm."""
    fam = Family.trivial(group)
    cat = orbit_category(group, fam)
    t = group.generator_ids[0]
    idx = {g: cat.index_of(0, 0, OrbitMorphism(0, 0, g))
           for g in range(group.order)}
    t_minus_one = ((idx[t], 1), (idx[0], -1))
    norm = tuple((idx[g], 1) for g in range(group.order))
    cells = [[0] for _ in range(length + 1)]
    entries = [dict()]
    for k in range(1, length + 1):
        entries.append({(0, 0): t_minus_one if k % 2 == 1 else norm})
    return ChainComplex(cat, cells, entries, check=True)


def test_cyclic_ordinary_cohomology_against_periodic_oracle():
    # two independent routes, one literal answer: Z, 0, Z/m, 0, Z/m
    for m in (2, 3, 4):
        cm = cyclic(m)
        fam = Family.trivial(cm)
        coeff = GModule.trivial(cm)
        expected = ["Z", "0", f"Z/{m}", "0", f"Z/{m}"]
        built = [bredon_cohomology(cm, fam, coeff, n).summary() for n in range(5)]
        assert built == expected
        oracle_complex = periodic_resolution(cm, 5)
        module = coefficient_module(coeff, cm, fam)
        oracle = [cohomology(oracle_complex, module, n).summary() for n in range(5)]
        assert oracle == expected


def test_full_family_kills_positive_degrees():
    for group in (cyclic(2), catalog_group("S3")):
        fam = Family.all(group)
        coeff = GModule.trivial(group)
        assert bredon_cohomology(group, fam, coeff, 0).summary() == "Z"
        for n in (1, 2, 3):
            assert bredon_cohomology(group, fam, coeff, n).is_trivial()


def test_degree_zero_of_constant_coefficient_is_z():
    s3 = catalog_group("S3")
    d8 = catalog_group("D8")
    center = next(SubgroupHandle(d8, s) for s, mem in enumerate(d8.subgroups)
                  if len(mem) == 2 and SubgroupHandle(d8, s).is_normal_in(d8.full_handle()))
    cases = [
        (s3, Family.trivial(s3)),
        (s3, Family.all(s3)),
        (d8, Family.generated_by(d8, [center])),
    ]
    for group, fam in cases:
        got = bredon_cohomology(group, fam, GModule.trivial(group), 0)
        assert got.summary() == "Z"


def test_auto_resolution_is_exact():
    s3 = catalog_group("S3")
    res = cached_resolution(orbit_category(s3, Family.all(s3)), 2)
    assert res.check_exact()
    res_tr = cached_resolution(orbit_category(s3, Family.trivial(s3)), 3)
    assert res_tr.check_exact(through_degree=2)


def test_resolution_cache_reuse_and_extension():
    c3 = cyclic(3)
    cat = orbit_category(c3, Family.trivial(c3))
    first = cached_resolution(cat, 2)
    again = cached_resolution(cat, 1)
    assert again is first
    longer = cached_resolution(cat, first.length() + 2)
    assert longer.length() >= first.length() + 2


def test_negative_degree_rejected():
    c2 = cyclic(2)
    with pytest.raises(DegreeOutOfRange):
        bredon_cohomology(c2, Family.trivial(c2), GModule.trivial(c2), -1)
    with pytest.raises(DegreeOutOfRange):
        bredon_cohomology_encoded(catalog_complex("Dinf"),
                                  catalog_complex("Dinf").battery[0], -2)


# -- encoded complexes -------------------------------------------------------

def test_dinf_catalog_values():
    dinf = catalog_complex("Dinf")
    by_name = {spec.name: spec for spec in dinf.battery}
    triv = by_name["Ztriv"]
    assert bredon_cohomology_encoded(dinf, triv, 0).summary() == "Z"
    assert bredon_cohomology_encoded(dinf, triv, 1).is_trivial()
    sign = by_name["sign"]
    assert bredon_cohomology_encoded(dinf, sign, 0).is_trivial()
    assert bredon_cohomology_encoded(dinf, sign, 1).summary() == "Z"
    # above the dimension everything is zero
    assert bredon_cohomology_encoded(dinf, triv, 2).is_trivial()
    assert bredon_cohomology_encoded(dinf, sign, 5).is_trivial()


def test_c2c3_catalog_values():
    tree = catalog_complex("C2*C3")
    by_name = {spec.name: spec for spec in tree.battery}
    assert bredon_cohomology_encoded(tree, by_name["Ztriv"], 0).summary() == "Z"
    assert bredon_cohomology_encoded(tree, by_name["Ztriv"], 1).is_trivial()
    assert bredon_cohomology_encoded(tree, by_name["signa"], 1).is_trivial()
    swap = by_name["swaprot"]
    assert bredon_cohomology_encoded(tree, swap, 0).summary() == "Z"
    assert bredon_cohomology_encoded(tree, swap, 1).invariant_factors == (0, 0)


def test_encoded_round_trip():
    dinf = catalog_complex("Dinf")
    back = load_complex(json.dumps(dinf.to_json()))
    assert back.cells == dinf.cells
    assert back.morphisms == dinf.morphisms
    assert back.boundaries == dinf.boundaries
    assert back.checked_exact
    assert [s.name for s in back.battery] == [s.name for s in dinf.battery]
    sign = next(s for s in back.battery if s.name == "sign")
    assert bredon_cohomology_encoded(back, sign, 1).summary() == "Z"


def test_corrupted_boundary_rejected():
    data = catalog_complex("Dinf").to_json()
    # flip one boundary coefficient: the edge no longer augments to zero
    data["boundaries"]["1"][0][3] = 1
    with pytest.raises(AxiomViolation, match="augment"):
        load_complex(data)


def test_boundary_squared_checked_through_composition_facts():
    classes = [EncodedClass(0, 1, 0), EncodedClass(1, 2, 1), EncodedClass(2, 2, 1)]
    cells = {0: [1, 2], 1: [0], 2: [0]}
    morphisms = {"pA": (0, 1), "pB": (0, 2), "i": (0, 0)}
    edge = [(0, 0, "pA", -1), (0, 1, "pB", 1)]
    comps = {("i", "pA"): {"pA": 1}, ("i", "pB"): {"pB": 1}}

    # a face glued once along the edge: boundary squared is pB - pA != 0
    with pytest.raises(AxiomViolation, match="squared"):
        EncodedComplex("bad", classes, cells, morphisms,
                       {1: edge, 2: [(0, 0, "i", 1)]}, compositions=comps)
    # glued twice with opposite signs: cancels, accepted
    good = EncodedComplex("ok", classes, cells, morphisms,
                          {1: edge, 2: [(0, 0, "i", 1), (0, 0, "i", -1)]},
                          compositions=comps)
    assert good.dimension() == 2
    # same complex without the needed composition fact
    with pytest.raises(AxiomViolation, match="composition fact"):
        EncodedComplex("incomplete", classes, cells, morphisms,
                       {1: edge, 2: [(0, 0, "i", 1), (0, 0, "i", -1)]},
                       compositions={("i", "pA"): {"pA": 1}})


def test_structural_validation_errors():
    classes = [EncodedClass(0, 1, 0), EncodedClass(1, 2, 1)]
    with pytest.raises(AxiomViolation, match="undeclared class"):
        EncodedComplex("x", classes, {0: [7]}, {}, {})
    with pytest.raises(AxiomViolation, match="undeclared morphism"):
        EncodedComplex("x", classes, {0: [1], 1: [0]}, {},
                       {1: [(0, 0, "nope", 1)]})
    with pytest.raises(AxiomViolation, match="does not match"):
        EncodedComplex("x", classes, {0: [1], 1: [0]},
                       {"p": (1, 1)}, {1: [(0, 0, "p", 1)]})


def test_unchecked_complex_refused():
    line = EncodedComplex(
        "raw", [EncodedClass(0, 1, 0), EncodedClass(1, 2, 1),
                EncodedClass(2, 2, 1)],
        {0: [1, 2], 1: [0]}, {"pA": (0, 1), "pB": (0, 2)},
        {1: [(0, 0, "pA", -1), (0, 1, "pB", 1)]}, checked_exact=False)
    table = CoefficientTable({0: FgAbelian.free(1), 1: FgAbelian.free(1),
                              2: FgAbelian.free(1)},
                             {"pA": IntMatrix([[1]]), "pB": IntMatrix([[1]])})
    with pytest.raises(AxiomViolation, match="declared exact"):
        bredon_cohomology_encoded(line, table, 0)


def test_incomplete_coefficient_names_the_gap():
    dinf = catalog_complex("Dinf")
    missing_action = CoefficientTable(
        {0: FgAbelian.free(1), 1: FgAbelian.free(1), 2: FgAbelian.free(1)},
        {"pA": IntMatrix([[1]])}, name="partial")
    with pytest.raises(IncompleteCoefficient, match="pB"):
        bredon_cohomology_encoded(dinf, missing_action, 0)
    missing_value = CoefficientTable(
        {0: FgAbelian.free(1), 1: FgAbelian.free(1)},
        {"pA": IntMatrix([[1]]), "pB": IntMatrix([[1]])}, name="short")
    with pytest.raises(IncompleteCoefficient, match="class 2"):
        bredon_cohomology_encoded(dinf, missing_value, 0)


def test_bad_action_shape_rejected():
    dinf = catalog_complex("Dinf")
    table = CoefficientTable(
        {0: FgAbelian.free(1), 1: FgAbelian.free(2), 2: FgAbelian.free(1)},
        {"pA": IntMatrix([[1]]), "pB": IntMatrix([[1]])}, name="lopsided")
    with pytest.raises(AxiomViolation, match="shape"):
        bredon_cohomology_encoded(dinf, table, 0)


def test_load_complex_rejects_bad_json():
    with pytest.raises(ParseError):
        load_complex("this is { not json")


# -- coefficient specs -------------------------------------------------------

def test_coefficient_spec_guards():
    c2 = cyclic(2)
    with pytest.raises(ValueError):
        CoefficientSpec("sharp", GModule.trivial(c2))
    with pytest.raises(ObjectMismatch):
        CoefficientSpec("fix", burnside_functor(c2))
    with pytest.raises(NotCohomological):
        CoefficientSpec("comack", burnside_functor(c2))
    spec = CoefficientSpec("comack",
                           fixed_point_functor(GModule.regular(c2)), "fp")
    assert spec.kind == "comack"
    s3 = catalog_group("S3")
    with pytest.raises(MismatchedParent):
        bredon_cohomology(s3, Family.trivial(s3), GModule.trivial(c2), 0)


def test_general_coefficient_family_restriction():
    s3 = catalog_group("S3")
    big = fixed_point_functor(GModule.regular(s3)).to_orbit_module()
    fam = Family.trivial(s3)
    spec = as_coefficient_spec(big)
    small = spec.to_orbit(s3, fam)
    assert small.category is orbit_category(s3, fam)
    small.validate()
    assert small.values[0].invariant_factors == (0,) * 6


def test_mackey_coefficient_matches_fix_route():
    # forgetting transfers after taking fixed points computes the same groups
    s3 = catalog_group("S3")
    fam = Family.trivial(s3)
    gmod = GModule.permutation(s3, handle_of_order(s3, 3))
    fix = CoefficientSpec("fix", gmod, "perm")
    mack = CoefficientSpec("comack", fixed_point_functor(gmod, family=fam), "fp")
    for n in range(3):
        left = bredon_cohomology(s3, fam, fix, n)
        right = bredon_cohomology(s3, fam, mack, n)
        assert left.invariant_factors == right.invariant_factors


# -- shapiro -----------------------------------------------------------------

def test_shapiro_c2_in_d8_trivial_coefficient():
    d8 = catalog_group("D8")
    rep = shapiro_check(d8, handle_of_order(d8, 2), Family.trivial(d8),
                        lambda n: GModule.trivial(n), max_degree=3)
    assert rep.ok
    assert [row.left for row in rep.rows] == [(0,), (), (2,), ()]


def test_shapiro_c3_in_s3_regular_coefficient():
    s3 = catalog_group("S3")
    rep = shapiro_check(s3, handle_of_order(s3, 3), Family.trivial(s3),
                        lambda n: GModule.regular(n), max_degree=3)
    assert rep.ok
    # Z[C3] is free, so only degree zero survives on both sides
    assert [row.left for row in rep.rows] == [(0,), (), (), ()]


def test_shapiro_mackey_coefficient():
    s3 = catalog_group("S3")
    handle = handle_of_order(s3, 2)
    fam = Family.trivial(s3)
    emb = subgroup_embedding(s3, handle, fam)
    coeff = CoefficientSpec(
        "comack",
        fixed_point_functor(GModule.regular(emb.subgroup), family=emb.family),
        "fp:regular")
    rep = shapiro_check(s3, handle, fam, coeff, max_degree=2)
    assert rep.ok


def test_shapiro_whole_group_is_tautological():
    s3 = catalog_group("S3")
    rep = shapiro_check(s3, s3.full_handle(), Family.trivial(s3),
                        lambda n: GModule.trivial(n), max_degree=2)
    assert rep.ok
    assert rep.context["index"] == 1


def test_conjugate_subgroups_compute_equal_cohomology():
    s3 = catalog_group("S3")
    fam = Family.trivial(s3)
    order2 = [sid for sid, mem in enumerate(s3.subgroups) if len(mem) == 2]
    assert len(order2) == 3
    results = []
    for sid in order2[:2]:
        emb = subgroup_embedding(s3, SubgroupHandle(s3, sid), fam)
        coeff = GModule.regular(emb.subgroup)
        results.append([
            bredon_cohomology(emb.subgroup, emb.family, coeff, n).invariant_factors
            for n in range(4)])
    assert results[0] == results[1]


# -- finite kernel -----------------------------------------------------------

def test_finite_kernel_c4_over_c2():
    c4 = cyclic(4)
    rep = finite_kernel_check(c4, handle_of_order(c4, 2), max_degree=3)
    assert rep.ok
    assert rep.context["quotient_order"] == 2
    triv_rows = [r for r in rep.rows if r.label == "Ztriv"]
    assert [r.left for r in triv_rows] == [(0,), (), (2,), ()]


def test_finite_kernel_d8_over_center():
    d8 = catalog_group("D8")
    center = next(SubgroupHandle(d8, s) for s, mem in enumerate(d8.subgroups)
                  if len(mem) == 2
                  and SubgroupHandle(d8, s).is_normal_in(d8.full_handle()))
    rep = finite_kernel_check(d8, center, max_degree=2)
    assert rep.ok
    assert rep.context["quotient_order"] == 4


def test_finite_kernel_trivial_kernel_tautology():
    c4 = cyclic(4)
    rep = finite_kernel_check(c4, c4.trivial_handle(), max_degree=2)
    assert rep.ok


def test_pullback_family_is_kernel_subgroups():
    c4 = cyclic(4)
    half = handle_of_order(c4, 2)
    qd = quotient_data(c4, half)
    fam = pullback_family(c4, qd, Family.trivial(qd.group))
    expected = {c4.class_of_subgroup(c4.trivial_handle().sub_id),
                c4.class_of_subgroup(half.sub_id)}
    assert fam.class_ids == frozenset(expected)


def test_finite_kernel_empty_battery_rejected():
    c4 = cyclic(4)
    with pytest.raises(ValueError):
        finite_kernel_check(c4, handle_of_order(c4, 2), battery=[])


# -- dimension reports -------------------------------------------------------

def test_dimension_report_full_family_all_witnesses_zero():
    s3 = catalog_group("S3")
    report = dimension_report((s3, Family.all(s3)), max_degree=2)
    assert report.witness_degrees() == (0, 0, 0, 0)
    assert report.resolution_terminated
    assert report.resolution_length == 0
    assert report.ok


def test_dimension_report_trivial_family_c2():
    c2 = cyclic(2)
    report = dimension_report((c2, Family.trivial(c2)), max_degree=4)
    assert report.witness_degrees() == (4, 4, 4, 4)
    assert report.resolution_length is None
    assert not report.resolution_terminated
    assert report.ok
    assert report.witnesses["fix"]["status"] == "witnessed lower bound"


def test_dimension_report_encoded_catalog():
    for name in ("Dinf", "C2*C3"):
        report = dimension_report(name)
        assert report.witness_degrees() == (1, 1, 1, 1)
        assert report.resolution_length == 1
        assert report.ok
        checks = {c[0] for c in report.consistency}
        assert "class ordering" in checks
        assert "length-orbit witness bound" in checks


def test_dimension_report_catalog_finite_name():
    report = dimension_report("S3", max_degree=2)
    assert report.witness_degrees() == (0, 0, 0, 0)
    assert report.ok


def test_dimension_report_empty_battery_rejected():
    s3 = catalog_group("S3")
    with pytest.raises(ValueError):
        dimension_report((s3, Family.all(s3)), battery=[])
    with pytest.raises(ValueError):
        dimension_report("Dinf", battery=[])


def test_default_battery_shape():
    s3 = catalog_group("S3")
    specs = default_battery(s3, Family.trivial(s3))
    kinds = {spec.kind for spec in specs}
    assert kinds == {"fix", "comack", "mack", "general"}
    names = [spec.name for spec in specs]
    assert len(names) == len(set(names))
    assert "Ztriv" in names
    # every entry converts to a module over the right category
    fam = Family.trivial(s3)
    for spec in specs:
        module = spec.to_orbit(s3, fam)
        assert module.category is orbit_category(s3, fam)


def test_non_family_subgroup_set_rejected():
    s3 = catalog_group("S3")
    c3_class = s3.class_of_subgroup(handle_of_order(s3, 3).sub_id)
    with pytest.raises(FamilyError):
        Family(s3, {c3_class})


def test_catalog_q8_is_quaternion():
    q8 = catalog_group("Q8")
    assert q8.order == 8
    involutions = [g for g in range(q8.order)
                   if g != 0 and q8.mul(g, g) == 0]
    assert len(involutions) == 1
