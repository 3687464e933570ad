import random

import pytest

from bredonkit.zmod import (
    AbMap,
    FgAbelian,
    IntMatrix,
    cokernel,
    hermite_column_basis,
    image,
    kernel,
    kernel_basis,
    lattice_contains,
    lattice_quotient,
    lattices_equal,
    random_unimodular,
    saturate_subgroup,
    smith_normal_form,
    solve,
    subquotient,
    smith_normal_form as snf,
)


def verify_snf(a):
    u, d, v = smith_normal_form(a)
    assert u * a * v == d
    # Diagonal, nonnegative, divisibility chain with zeros last.
    for i in range(d.rows):
        for j in range(d.cols):
            if i != j:
                assert d.data[i][j] == 0
    diag = [d.data[i][i] for i in range(min(d.rows, d.cols))]
    assert all(x >= 0 for x in diag)
    for x, y in zip(diag, diag[1:]):
        if x == 0:
            assert y == 0
        else:
            assert y % x == 0
    # Unimodularity: determinant is a unit.
    from bredonkit.zmod import determinant
    assert abs(determinant(u)) == 1
    assert abs(determinant(v)) == 1
    return diag


def test_snf_divisibility_example():
    diag = verify_snf(IntMatrix([[2, 0], [0, 3]]))
    assert diag == [1, 6]


def test_snf_rectangular_and_zero():
    assert verify_snf(IntMatrix([[4, 6, 10], [2, 2, 2]])) == [2, 2]
    assert verify_snf(IntMatrix.zeros(3, 2)) == [0, 0]
    assert verify_snf(IntMatrix([[0, 0, 0]])) == [0]


def test_snf_random_unimodular_invariance():
    rng = random.Random(7)
    for _ in range(25):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        a = IntMatrix([[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)])
        diag = verify_snf(a)
        p = random_unimodular(m, rng)
        q = random_unimodular(n, rng)
        assert verify_snf(p * a * q) == diag


def test_kernel_basis_and_solve():
    a = IntMatrix([[1, -1]])
    k = kernel_basis(a)
    assert k.cols == 1 and a * k == IntMatrix.zeros(1, 1)
    assert solve(IntMatrix([[2]]), [3]) is None
    assert solve(IntMatrix([[2]]), [6]) == [3]
    # Inconsistent beyond-rank coordinate.
    assert solve(IntMatrix([[1], [1]]), [1, 2]) is None


def test_hermite_canonical_for_lattice():
    rng = random.Random(3)
    a = IntMatrix([[2, 1], [0, 2]])
    for _ in range(10):
        q = random_unimodular(2, rng)
        assert hermite_column_basis(a * q) == hermite_column_basis(a)
    assert lattice_contains(a, [2, 0])
    assert not lattice_contains(a, [1, 1])


def test_fgabelian_normal_form():
    a = FgAbelian.from_relations(2, IntMatrix([[2, 0], [0, 3]]))
    assert a.invariant_factors == (6,)
    assert a.order == 6
    b = FgAbelian.from_factors([6])
    assert a.isomorphic(b)
    assert FgAbelian.free(2).invariant_factors == (0, 0)
    assert FgAbelian.from_factors([1, 1]).is_trivial()
    mixed = FgAbelian.from_relations(
        3, IntMatrix.from_columns([[2, 0, 0], [0, 4, 0]], rows=3))
    assert mixed.invariant_factors == (2, 4, 0)
    assert mixed.rank == 1 and mixed.order is None
    assert mixed.summary() == "Z + Z/2 + Z/4"


def test_element_arithmetic():
    a = FgAbelian.from_relations(2, IntMatrix.from_columns([[2, 0]], rows=2))
    assert a.element_is_zero([2, 0])
    assert not a.element_is_zero([1, 0])
    assert a.reduce_element([3, 5]) == a.reduce_element([1, 5])
    fin = FgAbelian.from_factors([2, 3])
    seen = {tuple(fin.reduce_element(v)) for v in fin.elements()}
    assert len(seen) == 6


def test_doubling_map_kernel_cokernel():
    z = FgAbelian.free(1)
    f = AbMap(z, z, IntMatrix([[2]]))
    assert f.well_formed()
    ker, incl = kernel(f)
    assert ker.is_trivial()
    cok, proj = cokernel(f)
    assert cok.invariant_factors == (2,)
    assert proj.well_formed()
    img, i_incl, i_proj = image(f)
    assert img.invariant_factors == (0,)
    assert i_incl.compose(i_proj).equal_to(f)
    assert incl.well_formed() and i_incl.well_formed() and i_proj.well_formed()


def test_difference_map_kernel():
    z2 = FgAbelian.free(2)
    z = FgAbelian.free(1)
    f = AbMap(z2, z, IntMatrix([[1, -1]]))
    ker, incl = kernel(f)
    assert ker.invariant_factors == (0,)
    assert f.compose(incl).is_zero_map()


def test_kernel_through_torsion_target():
    # Z --x2--> Z/4 has kernel 2Z and cokernel Z/2.
    z = FgAbelian.free(1)
    z4 = FgAbelian.from_factors([4])
    f = AbMap(z, z4, IntMatrix([[2]]))
    assert f.well_formed()
    ker, incl = kernel(f)
    assert ker.invariant_factors == (0,)
    assert f.compose(incl).is_zero_map()
    # The kernel sits at index 2 inside the source.
    assert incl.matrix == IntMatrix([[2]])
    cok, _ = cokernel(f)
    assert cok.invariant_factors == (2,)


def test_image_of_map_between_presented_groups():
    a = FgAbelian.from_factors([4])
    b = FgAbelian.from_factors([8])
    f = AbMap(a, b, IntMatrix([[2]]))
    assert f.well_formed()
    img, incl, proj = image(f)
    assert img.invariant_factors == (4,)
    assert incl.compose(proj).equal_to(f)


def test_subquotient():
    z = FgAbelian.free(1)
    grp, _ = subquotient(z, IntMatrix([[2]]), IntMatrix([[6]]))
    assert grp.invariant_factors == (3,)


def test_lattice_quotient_requires_containment():
    with pytest.raises(Exception):
        lattice_quotient(IntMatrix([[2]]), IntMatrix([[3]]))


def test_saturate_subgroup():
    # Closure of (1,0) in Z^2 under the swap action is the full diagonal pair.
    z2 = FgAbelian.free(2)
    swap = AbMap(z2, z2, IntMatrix([[0, 1], [1, 0]]))
    sub = saturate_subgroup(z2, [[1, 0]], [swap])
    assert sub.contains([0, 1]) and sub.contains([1, 0])
    assert sub.group.invariant_factors == (0, 0)
    # Doubling action only reaches the even multiples beyond the seed.
    double = AbMap(z2, z2, IntMatrix([[2, 0], [0, 2]]))
    sub2 = saturate_subgroup(z2, [[0, 1]], [double])
    assert sub2.contains([0, 1]) and not sub2.contains([1, 0])


def test_saturation_is_deterministic_and_minimal():
    z = FgAbelian.free(1)
    triple = AbMap(z, z, IntMatrix([[3]]))
    sub = saturate_subgroup(z, [[6]], [triple])
    assert sub.lattice == IntMatrix([[6]])


def test_random_exact_sequence_roundtrip():
    # ker -> source -> image must be exact for random small maps.
    rng = random.Random(11)
    for _ in range(20):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        src = FgAbelian.free(n)
        tgt = FgAbelian.from_factors(
            [rng.choice([0, 2, 3, 4]) for _ in range(m)])
        f = AbMap(src, tgt, IntMatrix(
            [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)]))
        ker, incl = kernel(f)
        assert f.compose(incl).is_zero_map()
        img, i_incl, i_proj = image(f)
        assert i_incl.compose(i_proj).equal_to(f)
        cok, proj = cokernel(f)
        assert proj.compose(f).is_zero_map()
        # Rank bookkeeping: rank(source) = rank(ker) + rank(im) for free source.
        assert n == ker.rank + img.rank


def test_lattices_equal():
    assert lattices_equal(IntMatrix([[2, 3]]), IntMatrix([[1]]))
    assert not lattices_equal(IntMatrix([[2]]), IntMatrix([[1]]))
