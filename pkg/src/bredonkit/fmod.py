"""Modules over finite additive categories and their homological algebra.

A module assigns a finitely presented abelian group to every object of an
orbit or span category and an additive map to every basis morphism
(contravariantly by default).  On top of that sit natural transformations,
hom and tensor over the category, induction/coinduction along functors,
free modules and resolutions, and cochain cohomology.

All computations reduce to exact integer linear algebra from ``zmod``; the
category's composition table is the sole source of relations, so every
result is reproducible from the table alone.
"""

from __future__ import annotations

from .cats import CatFunctor, FiniteAdditiveCategory, combo_add, combo_scale
from .errors import AxiomViolation, ObjectMismatch, ResourceError
from .zmod import (
    AbMap,
    FgAbelian,
    IntMatrix,
    _SnfSolver,
    cokernel,
    express_through_inclusion,
    hermite_column_basis,
    kernel_basis,
    lattice_contains,
    lattice_quotient,
    lattice_sum,
    preimage_lattice,
)
from .zmod import kernel as abelian_kernel


class CatModule:
    """A functor from a finite additive category to abelian groups.

    ``values[i]`` is an FgAbelian per object index; ``actions[(a, b, j)]`` an
    AbMap per basis morphism, mapping values[b] -> values[a] when the
    variance is "contra" (the default) and values[a] -> values[b] when "co".
    """

    def __init__(self, category: FiniteAdditiveCategory, values, actions,
                 variance: str = "contra"):
        if variance not in ("contra", "co"):
            raise ObjectMismatch("variance must be 'contra' or 'co'")
        self.category = category
        self.values = dict(values)
        # Keep dict subclasses intact: span modules assemble actions lazily.
        self.actions = actions if isinstance(actions, dict) else dict(actions)
        self.variance = variance

    def value(self, obj: int) -> FgAbelian:
        return self.values[obj]

    def action(self, a: int, b: int, combo) -> AbMap:
        """Linear extension of the basis actions to a morphism combination."""
        if self.variance == "contra":
            src, tgt = self.values[b], self.values[a]
        else:
            src, tgt = self.values[a], self.values[b]
        out = AbMap.zero(src, tgt)
        for idx, coeff in combo:
            step = self.actions[(a, b, idx)]
            out = out + AbMap(src, tgt, step.matrix * coeff)
        return out

    def validate(self):
        """Check well-formedness, identities, and functoriality over the table.

        Raises AxiomViolation naming the first offending morphism pair.
        """
        cat = self.category
        n = cat.object_count()
        for key, mp in self.actions.items():
            if not mp.well_formed():
                raise AxiomViolation(f"action at {key} does not respect relations")
        for a in range(n):
            ident = self.action(a, a, cat.identity_combo(a))
            if not ident.equal_to(AbMap.identity(self.values[a])):
                raise AxiomViolation(f"identity of object {a} does not act as identity")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for i in range(cat.hom_rank(a, b)):
                        for j in range(cat.hom_rank(b, c)):
                            comp = self.action(a, c, cat.compose_basis(a, b, c, i, j))
                            f_map = self.action(a, b, ((i, 1),))
                            g_map = self.action(b, c, ((j, 1),))
                            two_step = f_map.compose(g_map) if self.variance == "contra" \
                                else g_map.compose(f_map)
                            if not comp.equal_to(two_step):
                                raise AxiomViolation(
                                    f"functoriality fails at ({a},{b},{c}) basis ({i},{j})")
        return True

    def is_zero(self) -> bool:
        return all(v.is_trivial() for v in self.values.values())

    def summary(self):
        return {obj: self.values[obj].summary() for obj in sorted(self.values)}


def constant_module(category: FiniteAdditiveCategory, fiber: FgAbelian = None) -> CatModule:
    """The constant coefficient system: same value everywhere, every basis
    morphism acting as the identity.  Functorial over orbit categories, where
    every composition table entry is a single basis morphism."""
    if category.flavor != "orbit":
        raise ObjectMismatch("constant coefficients need the orbit flavor")
    fiber = fiber or FgAbelian.free(1)
    n = category.object_count()
    values = {i: fiber for i in range(n)}
    actions = {}
    for (a, b), basis in category.hom_basis.items():
        for j in range(len(basis)):
            actions[(a, b, j)] = AbMap.identity(fiber)
    return CatModule(category, values, actions)


class NatTrans:
    """A natural transformation: one AbMap per object, same variance."""

    def __init__(self, source: CatModule, target: CatModule, components):
        if source.category is not target.category:
            raise ObjectMismatch("natural transformation across different categories")
        self.source = source
        self.target = target
        self.components = dict(components)

    def component(self, obj: int) -> AbMap:
        return self.components[obj]

    def check_natural(self) -> bool:
        cat = self.source.category
        contra = self.source.variance == "contra"
        for (a, b), basis in cat.hom_basis.items():
            for j in range(len(basis)):
                combo = ((j, 1),)
                m_map = self.source.action(a, b, combo)
                n_map = self.target.action(a, b, combo)
                if contra:
                    lhs = self.components[a].compose(m_map)
                    rhs = n_map.compose(self.components[b])
                else:
                    lhs = self.components[b].compose(m_map)
                    rhs = n_map.compose(self.components[a])
                if not lhs.equal_to(rhs):
                    return False
        return True

    def is_zero(self) -> bool:
        return all(c.is_zero_map() for c in self.components.values())

    def __add__(self, other):
        return NatTrans(self.source, self.target,
                        {k: self.components[k] + other.components[k]
                         for k in self.components})

    def __sub__(self, other):
        return NatTrans(self.source, self.target,
                        {k: self.components[k] - other.components[k]
                         for k in self.components})

    def compose(self, first: "NatTrans") -> "NatTrans":
        return NatTrans(first.source, self.target,
                        {k: self.components[k].compose(first.components[k])
                         for k in self.components})


def kernel_module(tau: NatTrans):
    """Objectwise kernel of a natural transformation, with induced actions.

    Returns (module, inclusion NatTrans)."""
    m = tau.source
    cat = m.category
    values, inclusions = {}, {}
    for obj in range(cat.object_count()):
        grp, incl = abelian_kernel(tau.components[obj])
        values[obj] = grp
        inclusions[obj] = incl
    actions = {}
    for (a, b), basis in cat.hom_basis.items():
        for j in range(len(basis)):
            act = m.actions[(a, b, j)]
            if m.variance == "contra":
                src_obj, tgt_obj = b, a
            else:
                src_obj, tgt_obj = a, b
            restricted = act.compose(inclusions[src_obj])
            actions[(a, b, j)] = express_through_inclusion(
                inclusions[tgt_obj], restricted)
    module = CatModule(cat, values, actions, m.variance)
    incl_nat = NatTrans(module, m, inclusions)
    return module, incl_nat


def cokernel_module(tau: NatTrans):
    """Objectwise cokernel, with the projection NatTrans."""
    n = tau.target
    cat = n.category
    values, projections = {}, {}
    for obj in range(cat.object_count()):
        grp, proj = cokernel(tau.components[obj])
        values[obj] = grp
        projections[obj] = proj
    actions = {}
    for key, act in n.actions.items():
        a, b, _ = key
        if n.variance == "contra":
            src_obj, tgt_obj = b, a
        else:
            src_obj, tgt_obj = a, b
        actions[key] = AbMap(values[src_obj], values[tgt_obj], act.matrix)
    module = CatModule(cat, values, actions, n.variance)
    proj_nat = NatTrans(n, module, projections)
    return module, proj_nat


# -- free modules ------------------------------------------------------------


class FreeModule:
    """Direct sum of representable modules, one summand per cell.

    Cells are object indices; the value at b is the free abelian group on
    the disjoint union of hom(b, cell) bases (contravariant) or hom(cell, b)
    (covariant).  ``offsets[b][k]`` is the first coordinate of cell k's block.
    """

    def __init__(self, category: FiniteAdditiveCategory, cells,
                 variance: str = "contra"):
        self.category = category
        self.cells = list(cells)
        self.variance = variance
        n = category.object_count()
        values, offsets = {}, {}
        for b in range(n):
            off, pos = [], 0
            for c in self.cells:
                off.append(pos)
                pos += category.hom_rank(b, c) if variance == "contra" \
                    else category.hom_rank(c, b)
            offsets[b] = off
            values[b] = FgAbelian.free(pos)
        actions = {}
        for (a, b), basis in category.hom_basis.items():
            for j in range(len(basis)):
                actions[(a, b, j)] = self._action_matrix(a, b, j, values, offsets)
        self.offsets = offsets
        self.module = CatModule(category, values, actions, variance)

    def _action_matrix(self, a, b, j, values, offsets):
        cat = self.category
        if self.variance == "contra":
            src_obj, tgt_obj = b, a
        else:
            src_obj, tgt_obj = a, b
        rows = values[tgt_obj].ambient_rank
        cols = values[src_obj].ambient_rank
        mat = [[0] * cols for _ in range(rows)]
        for k, c in enumerate(self.cells):
            if self.variance == "contra":
                # basis psi in hom(b, c) goes to psi after the morphism.
                for p in range(cat.hom_rank(b, c)):
                    out = cat.compose(a, b, c, ((j, 1),), ((p, 1),))
                    col = offsets[b][k] + p
                    for q, coeff in out:
                        mat[offsets[a][k] + q][col] += coeff
            else:
                # basis psi in hom(c, a) goes to the morphism after psi.
                for p in range(cat.hom_rank(c, a)):
                    out = cat.compose(c, a, b, ((p, 1),), ((j, 1),))
                    col = offsets[a][k] + p
                    for q, coeff in out:
                        mat[offsets[b][k] + q][col] += coeff
        return AbMap(values[src_obj], values[tgt_obj], IntMatrix(mat))

    def basis_coordinate(self, obj: int, cell_pos: int, basis_idx: int) -> int:
        return self.offsets[obj][cell_pos] + basis_idx

    def decompose(self, obj: int, vec):
        """Split an ambient vector into (cell_pos, combo) pieces."""
        cat = self.category
        out = []
        for k, c in enumerate(self.cells):
            rank = cat.hom_rank(obj, c) if self.variance == "contra" \
                else cat.hom_rank(c, obj)
            base = self.offsets[obj][k]
            combo = tuple((i, vec[base + i]) for i in range(rank) if vec[base + i])
            out.append(combo)
        return out


def free_module(category, cells, variance="contra") -> FreeModule:
    return FreeModule(category, cells, variance)


def yoneda_embed(free: FreeModule, target: CatModule, images) -> NatTrans:
    """The map out of a free module classified by elements of the target.

    ``images[k]`` is an ambient vector of target.value(cells[k]); the basis
    morphism psi in hom(b, c_k) goes to target.action(psi) applied to it.
    """
    cat = free.category
    if target.variance != free.variance:
        raise ObjectMismatch("variance mismatch in yoneda_embed")
    comps = {}
    for b in range(cat.object_count()):
        cols = []
        for k, c in enumerate(free.cells):
            if free.variance == "contra":
                rank = cat.hom_rank(b, c)
                for p in range(rank):
                    cols.append(target.action(b, c, ((p, 1),)).apply(images[k]))
            else:
                rank = cat.hom_rank(c, b)
                for p in range(rank):
                    cols.append(target.action(c, b, ((p, 1),)).apply(images[k]))
        comps[b] = AbMap(free.module.values[b], target.values[b],
                         IntMatrix.from_columns(cols, rows=target.values[b].ambient_rank))
    return NatTrans(free.module, target, comps)


def yoneda_eval(category, c: int, module: CatModule):
    """The evaluation isomorphism Hom(free on c, M) = M(c).

    Returns (value, unit) where unit(vec) is the NatTrans classified by the
    ambient vector vec of M(c); its component at c sends the identity basis
    element back to vec, realizing the isomorphism.
    """
    free = FreeModule(category, [c], module.variance)

    def unit(vec):
        return yoneda_embed(free, module, [list(vec)])

    return module.values[c], unit


# -- hom and tensor over the category ----------------------------------------


class HomGroup:
    """Hom over the category between two same-variance modules.

    ``group`` presents the hom group; ``basis_trans(i)`` returns the natural
    transformation for the i-th ambient generator; ``coordinates(tau)``
    expresses a transformation in those generators (mod relations).
    """

    def __init__(self, source: CatModule, target: CatModule):
        if source.category is not target.category:
            raise ObjectMismatch("hom across different categories")
        if source.variance != target.variance:
            raise ObjectMismatch("hom needs matching variance")
        self.source = source
        self.target = target
        cat = source.category
        n = cat.object_count()
        self._shapes = []
        self._starts = []
        total = 0
        for obj in range(n):
            rows = target.values[obj].ambient_rank
            cols = source.values[obj].ambient_rank
            self._starts.append(total)
            self._shapes.append((rows, cols))
            total += rows * cols
        self._nvars = total

        rows = []

        def var_index(obj, r, c):
            return self._starts[obj] + r * source.values[obj].ambient_rank + c

        def add_equation(coeffs, relation_matrix):
            """coeffs: dict var -> coeff; the equation must vanish mod the
            column lattice of relation_matrix (slack columns appended)."""
            rows.append((dict(coeffs), relation_matrix))

        # Well-definedness: X_obj carries source relations into target relations.
        for obj in range(n):
            src = source.values[obj]
            tgt = target.values[obj]
            for j in range(src.relations.cols):
                rel = src.relations.column(j)
                for r in range(tgt.ambient_rank):
                    coeffs = {}
                    for c in range(src.ambient_rank):
                        if rel[c]:
                            coeffs[var_index(obj, r, c)] = rel[c]
                    add_equation(coeffs, (tgt, r))
        # Naturality squares over every basis morphism.
        contra = source.variance == "contra"
        for (a, b), basis in cat.hom_basis.items():
            for j in range(len(basis)):
                m_map = source.action(a, b, ((j, 1),))
                n_map = target.action(a, b, ((j, 1),))
                if contra:
                    dom_obj, cod_obj = b, a
                else:
                    dom_obj, cod_obj = a, b
                # N(phi) X_dom - X_cod M(phi) == 0 mod target relations at cod.
                src_dom = source.values[dom_obj]
                tgt_cod = target.values[cod_obj]
                for r in range(tgt_cod.ambient_rank):
                    for c in range(src_dom.ambient_rank):
                        coeffs = {}
                        for k in range(target.values[dom_obj].ambient_rank):
                            v = n_map.matrix.data[r][k]
                            if v:
                                key = var_index(dom_obj, k, c)
                                coeffs[key] = coeffs.get(key, 0) + v
                        for k in range(source.values[cod_obj].ambient_rank):
                            v = m_map.matrix.data[k][c]
                            if v:
                                key = var_index(cod_obj, r, k)
                                coeffs[key] = coeffs.get(key, 0) - v
                        if coeffs:
                            add_equation(coeffs, (tgt_cod, r))
                        else:
                            add_equation({}, (tgt_cod, r))

        # Assemble the sparse system with slack variables per equation row.
        slack_total = 0
        slack_info = []
        for coeffs, (tgt, r) in rows:
            slack_info.append((slack_total, tgt, r))
            slack_total += tgt.relations.cols
        big_rows = len(rows)
        mat = [[0] * (self._nvars + slack_total) for _ in range(big_rows)]
        for i, (coeffs, (tgt, r)) in enumerate(rows):
            for v, coeff in coeffs.items():
                mat[i][v] = coeff
            start = self._nvars + slack_info[i][0]
            for j in range(tgt.relations.cols):
                mat[i][start + j] = tgt.relations.data[r][j]
        system = IntMatrix(mat, cols=self._nvars + slack_total)
        ker = kernel_basis(system)
        sol_cols = [ker.column(j)[: self._nvars] for j in range(ker.cols)]
        solution_lattice = hermite_column_basis(
            IntMatrix.from_columns(sol_cols, rows=self._nvars))
        # The zero sublattice: components valued inside target relations.
        zero_cols = []
        for obj in range(n):
            tgt = target.values[obj]
            src = source.values[obj]
            for j in range(tgt.relations.cols):
                rel = tgt.relations.column(j)
                for c in range(src.ambient_rank):
                    vec = [0] * self._nvars
                    for r in range(tgt.ambient_rank):
                        if rel[r]:
                            vec[var_index(obj, r, c)] = rel[r]
                    zero_cols.append(vec)
        zero_lattice = IntMatrix.from_columns(zero_cols, rows=self._nvars)
        self.group, self._basis = lattice_quotient(
            lattice_sum(solution_lattice, zero_lattice), zero_lattice)
        self._zero_lattice = zero_lattice
        self._coord_solver = _SnfSolver(self._basis.hstack(zero_lattice)) \
            if self._basis.cols or zero_lattice.cols else None
        self._var_index = var_index

    def rank_vector(self):
        return self.group.invariant_factors

    def _unflatten(self, vec):
        comps = {}
        cat = self.source.category
        for obj in range(cat.object_count()):
            rows, cols = self._shapes[obj]
            start = self._starts[obj]
            mat = [[vec[start + r * cols + c] for c in range(cols)]
                   for r in range(rows)]
            comps[obj] = AbMap(self.source.values[obj], self.target.values[obj],
                               IntMatrix(mat, cols=cols))
        return comps

    def basis_trans(self, i: int) -> NatTrans:
        return NatTrans(self.source, self.target,
                        self._unflatten(self._basis.column(i)))

    def flatten(self, tau: NatTrans):
        vec = [0] * self._nvars
        for obj, mp in tau.components.items():
            rows, cols = self._shapes[obj]
            start = self._starts[obj]
            for r in range(rows):
                for c in range(cols):
                    vec[start + r * cols + c] = mp.matrix.data[r][c]
        return vec

    def coordinates(self, tau: NatTrans):
        """Coordinates of a natural transformation in the presented group."""
        if self._coord_solver is None:
            return []
        sol = self._coord_solver.solve(self.flatten(tau))
        if sol is None:
            raise ObjectMismatch("transformation is not in the computed hom lattice")
        return sol[: self._basis.cols]


def hom_over_category(source: CatModule, target: CatModule) -> HomGroup:
    """Hom of modules over the category, as a finitely presented group."""
    return HomGroup(source, target)


class TensorGroup:
    """Tensor of a contravariant and a covariant module over the category.

    Generators are pure tensors over ambient generators at each object;
    relations identify value relations and slide basis morphisms across.
    """

    def __init__(self, left: CatModule, right: CatModule):
        if left.category is not right.category:
            raise ObjectMismatch("tensor across different categories")
        if left.variance != "contra" or right.variance != "co":
            raise ObjectMismatch("tensor takes (contra, co) modules")
        self.left = left
        self.right = right
        cat = left.category
        n = cat.object_count()
        starts, total = [], 0
        for obj in range(n):
            starts.append(total)
            total += left.values[obj].ambient_rank * right.values[obj].ambient_rank
        self._starts = starts
        self._total = total
        rel_cols = []
        for obj in range(n):
            lv, rv = left.values[obj], right.values[obj]
            for j in range(lv.relations.cols):
                rel = lv.relations.column(j)
                for c in range(rv.ambient_rank):
                    vec = [0] * total
                    for r in range(lv.ambient_rank):
                        if rel[r]:
                            vec[self.pos(obj, r, c)] = rel[r]
                    rel_cols.append(vec)
            for j in range(rv.relations.cols):
                rel = rv.relations.column(j)
                for r in range(lv.ambient_rank):
                    vec = [0] * total
                    for c in range(rv.ambient_rank):
                        if rel[c]:
                            vec[self.pos(obj, r, c)] = rel[c]
                    rel_cols.append(vec)
        for (a, b), basis in cat.hom_basis.items():
            for j in range(len(basis)):
                lmap = left.action(a, b, ((j, 1),))   # left(b) -> left(a)
                rmap = right.action(a, b, ((j, 1),))  # right(a) -> right(b)
                la, lb = left.values[a], left.values[b]
                ra, rb = right.values[a], right.values[b]
                for i in range(lb.ambient_rank):
                    for c in range(ra.ambient_rank):
                        vec = [0] * total
                        # (phi^* m) tensor n at object a
                        for r in range(la.ambient_rank):
                            v = lmap.matrix.data[r][i]
                            if v:
                                vec[self.pos(a, r, c)] += v
                        # minus m tensor (phi_* n) at object b
                        for r in range(rb.ambient_rank):
                            v = rmap.matrix.data[r][c]
                            if v:
                                vec[self.pos(b, i, r)] -= v
                        rel_cols.append(vec)
        self.group = FgAbelian(total, IntMatrix.from_columns(rel_cols, rows=total))

    def pos(self, obj: int, left_idx: int, right_idx: int) -> int:
        return self._starts[obj] + \
            left_idx * self.right.values[obj].ambient_rank + right_idx

    def pure(self, obj: int, left_vec, right_vec):
        """Ambient vector of a pure tensor at an object."""
        vec = [0] * self._total
        for r, lv in enumerate(left_vec):
            if lv:
                for c, rv in enumerate(right_vec):
                    if rv:
                        vec[self.pos(obj, r, c)] += lv * rv
        return vec


def tensor_over_category(left: CatModule, right: CatModule) -> TensorGroup:
    return TensorGroup(left, right)


# -- change of categories -----------------------------------------------------


def restrict_along(functor: CatFunctor, module: CatModule) -> CatModule:
    """Pull a module back along a functor: res(M)(d) = M(F(d))."""
    src_cat = functor.source
    values = {d: module.values[functor.obj_map[d]]
              for d in range(src_cat.object_count())}
    actions = {}
    for (a, b), basis in src_cat.hom_basis.items():
        fa, fb = functor.obj_map[a], functor.obj_map[b]
        for j in range(len(basis)):
            img = functor.mor_map[(a, b, j)]
            actions[(a, b, j)] = module.action(fa, fb, img)
    return CatModule(src_cat, values, actions, module.variance)


def induce_along(functor: CatFunctor, module: CatModule) -> CatModule:
    """Left Kan extension along a functor of a contravariant module.

    The value at c is the tensor over the source category of M with the
    covariant module d -> Z[c, F(d)]; actions precompose the free variable.
    """
    if module.variance != "contra":
        raise ObjectMismatch("induction implemented for contravariant modules")
    d_cat = functor.source
    c_cat = functor.target
    nd = d_cat.object_count()

    # Ambient layout at target object c: blocks (d, m_i, psi) with psi a basis
    # element of hom_C(c, F(d)).
    def layout(c):
        starts, total = [], 0
        for d in range(nd):
            m_rank = module.values[d].ambient_rank
            h_rank = c_cat.hom_rank(c, functor.obj_map[d])
            starts.append(total)
            total += m_rank * h_rank
        return starts, total

    def pos(starts, c, d, i, p):
        return starts[d] + i * c_cat.hom_rank(c, functor.obj_map[d]) + p

    values = {}
    layouts = {}
    for c in range(c_cat.object_count()):
        starts, total = layout(c)
        layouts[c] = (starts, total)
        rel_cols = []
        for d in range(nd):
            mv = module.values[d]
            h_rank = c_cat.hom_rank(c, functor.obj_map[d])
            for j in range(mv.relations.cols):
                rel = mv.relations.column(j)
                for p in range(h_rank):
                    vec = [0] * total
                    for i in range(mv.ambient_rank):
                        if rel[i]:
                            vec[pos(starts, c, d, i, p)] = rel[i]
                    rel_cols.append(vec)
        for (d1, d2), basis in d_cat.hom_basis.items():
            fd1, fd2 = functor.obj_map[d1], functor.obj_map[d2]
            for j in range(len(basis)):
                mmap = module.action(d1, d2, ((j, 1),))  # M(d2) -> M(d1)
                fimg = functor.mor_map[(d1, d2, j)]
                for i in range(module.values[d2].ambient_rank):
                    for p in range(c_cat.hom_rank(c, fd1)):
                        vec = [0] * total
                        for r in range(module.values[d1].ambient_rank):
                            v = mmap.matrix.data[r][i]
                            if v:
                                vec[pos(starts, c, d1, r, p)] += v
                        pushed = c_cat.compose(c, fd1, fd2, ((p, 1),), fimg)
                        for q, coeff in pushed:
                            vec[pos(starts, c, d2, i, q)] -= coeff
                        rel_cols.append(vec)
        values[c] = FgAbelian(total, IntMatrix.from_columns(rel_cols, rows=total))

    actions = {}
    for (a, b), basis in c_cat.hom_basis.items():
        sa, ta = layouts[a]
        sb, tb = layouts[b]
        for j in range(len(basis)):
            # induced(b) -> induced(a): precompose the hom coordinate.
            mat = [[0] * tb for _ in range(ta)]
            for d in range(nd):
                fd = functor.obj_map[d]
                m_rank = module.values[d].ambient_rank
                for p in range(c_cat.hom_rank(b, fd)):
                    moved = c_cat.compose(a, b, fd, ((j, 1),), ((p, 1),))
                    for i in range(m_rank):
                        col = pos(sb, b, d, i, p)
                        for q, coeff in moved:
                            mat[pos(sa, a, d, i, q)][col] += coeff
            actions[(a, b, j)] = AbMap(values[b], values[a],
                                       IntMatrix(mat, cols=tb))
    return CatModule(c_cat, values, actions, "contra")


def coinduce_along(functor: CatFunctor, module: CatModule) -> CatModule:
    """Right Kan extension: value at c is Hom over the source category of the
    contravariant module d -> Z[F(d), c] into M."""
    if module.variance != "contra":
        raise ObjectMismatch("coinduction implemented for contravariant modules")
    d_cat = functor.source
    c_cat = functor.target

    def probe_module(c):
        """The contravariant module d -> Z hom_C(F(d), c)."""
        values = {d: FgAbelian.free(c_cat.hom_rank(functor.obj_map[d], c))
                  for d in range(d_cat.object_count())}
        actions = {}
        for (d1, d2), basis in d_cat.hom_basis.items():
            fd1, fd2 = functor.obj_map[d1], functor.obj_map[d2]
            for j in range(len(basis)):
                fimg = functor.mor_map[(d1, d2, j)]
                rows = values[d1].ambient_rank
                cols = values[d2].ambient_rank
                mat = [[0] * cols for _ in range(rows)]
                for p in range(cols):
                    moved = c_cat.compose(fd1, fd2, c, fimg, ((p, 1),))
                    for q, coeff in moved:
                        mat[q][p] += coeff
                actions[(d1, d2, j)] = AbMap(values[d2], values[d1],
                                             IntMatrix(mat, cols=cols))
        return CatModule(d_cat, values, actions, "contra")

    probes = {c: probe_module(c) for c in range(c_cat.object_count())}
    homs = {c: HomGroup(probes[c], module) for c in probes}
    values = {c: homs[c].group for c in homs}

    actions = {}
    for (a, b), basis in c_cat.hom_basis.items():
        for j in range(len(basis)):
            # coind(b) -> coind(a): postcompose probe elements into b.
            cols = []
            hom_b, hom_a = homs[b], homs[a]
            for i in range(values[b].ambient_rank):
                tau = hom_b.basis_trans(i)
                comps = {}
                for d in range(d_cat.object_count()):
                    fd = functor.obj_map[d]
                    # map Z[F(d), a] -> Z[F(d), b] by composing with the morphism
                    rows = c_cat.hom_rank(fd, b)
                    cls_ = c_cat.hom_rank(fd, a)
                    mat = [[0] * cls_ for _ in range(rows)]
                    for p in range(cls_):
                        moved = c_cat.compose(fd, a, b, ((p, 1),), ((j, 1),))
                        for q, coeff in moved:
                            mat[q][p] += coeff
                    push = AbMap(probes[a].values[d], probes[b].values[d],
                                 IntMatrix(mat, cols=cls_))
                    comps[d] = tau.components[d].compose(push)
                moved_tau = NatTrans(probes[a], module, comps)
                cols.append(hom_a.coordinates(moved_tau))
            actions[(a, b, j)] = AbMap(
                values[b], values[a],
                IntMatrix.from_columns(cols, rows=values[a].ambient_rank))
    return CatModule(c_cat, values, actions, "contra")


# -- submodules and resolutions ----------------------------------------------


def generated_submodule(module: CatModule, seeds):
    """Saturate seed vectors into a submodule lattice, one lattice per object.

    ``seeds`` maps object index -> list of ambient vectors.  The result
    contains the relation lattices and is closed under every basis action.
    Returns {obj: IntMatrix} of canonical lattice bases.
    """
    cat = module.category
    n = cat.object_count()
    current = {}
    for obj in range(n):
        cols = [list(v) for v in seeds.get(obj, [])]
        cols.extend(module.values[obj].relations.columns())
        current[obj] = hermite_column_basis(IntMatrix.from_columns(
            cols, rows=module.values[obj].ambient_rank))
    contra = module.variance == "contra"
    while True:
        changed = False
        for (a, b), basis in cat.hom_basis.items():
            src_obj, tgt_obj = (b, a) if contra else (a, b)
            if current[src_obj].cols == 0:
                continue
            for j in range(len(basis)):
                mp = module.actions[(a, b, j)]
                pushed = mp.matrix * current[src_obj]
                merged = lattice_sum(current[tgt_obj], pushed)
                if merged != current[tgt_obj]:
                    current[tgt_obj] = merged
                    changed = True
        if not changed:
            return current


def submodule_contains(lattices, obj: int, vec) -> bool:
    return lattice_contains(lattices[obj], vec)


def submodule_from_seeds(module: CatModule, seeds):
    """The submodule generated by seed vectors, as a module with an inclusion.

    Presents each value on the saturated lattice basis from
    generated_submodule and re-expresses every action through the inclusion.
    Returns (CatModule, NatTrans embedding it into ``module``).
    """
    cat = module.category
    lattices = generated_submodule(module, seeds)
    values = {}
    incls = {}
    for obj in range(cat.object_count()):
        amb = module.values[obj]
        basis = lattices[obj]
        carrier = AbMap(FgAbelian.free(basis.cols), amb, basis)
        rels = preimage_lattice(carrier)
        values[obj] = FgAbelian.from_relations(basis.cols, rels)
        incls[obj] = AbMap(values[obj], amb, basis)
    actions = {}
    for (a, b, j), mp in module.actions.items():
        src_obj, tgt_obj = (b, a) if module.variance == "contra" else (a, b)
        inner = express_through_inclusion(
            incls[tgt_obj], mp.compose(incls[src_obj]))
        actions[(a, b, j)] = inner
    sub = CatModule(cat, values, actions, module.variance)
    include = NatTrans(sub, module, incls)
    return sub, include


def direct_sum_modules(category, modules):
    """Componentwise direct sum of modules of equal variance.

    Returns (sum module, offsets) where offsets[i][obj] = (start, stop) of
    summand i's ambient block inside the sum's value at obj.
    """
    if not modules:
        raise ObjectMismatch("direct sum needs at least one module")
    variance = modules[0].variance
    for m in modules:
        if m.category is not category or m.variance != variance:
            raise ObjectMismatch("direct sum needs modules over one category")
    n = category.object_count()
    values = {}
    offsets = [dict() for _ in modules]
    for obj in range(n):
        start = 0
        rel_blocks = []
        for i, m in enumerate(modules):
            val = m.values[obj]
            offsets[i][obj] = (start, start + val.ambient_rank)
            start += val.ambient_rank
            rel_blocks.append(val.relations)
        total = start
        cols = []
        for i, block in enumerate(rel_blocks):
            lo = offsets[i][obj][0]
            for c in block.columns():
                col = [0] * total
                col[lo:lo + len(c)] = list(c)
                cols.append(col)
        values[obj] = FgAbelian.from_relations(
            total, IntMatrix.from_columns(cols, rows=total))
    actions = {}
    for (a, b), basis in category.hom_basis.items():
        for j in range(len(basis)):
            key = (a, b, j)
            src_obj, tgt_obj = (b, a) if variance == "contra" else (a, b)
            src, tgt = values[src_obj], values[tgt_obj]
            mat = [[0] * src.ambient_rank for _ in range(tgt.ambient_rank)]
            for i, m in enumerate(modules):
                block = m.actions[key].matrix
                r0 = offsets[i][tgt_obj][0]
                c0 = offsets[i][src_obj][0]
                for r in range(block.rows):
                    row = block.data[r]
                    for c in range(block.cols):
                        mat[r0 + r][c0 + c] = row[c]
            actions[key] = AbMap(src, tgt, IntMatrix(mat, cols=src.ambient_rank))
    return CatModule(category, values, actions, variance), offsets


def nat_is_surjective(tau: NatTrans) -> bool:
    """True when every component hits the whole target group."""
    for obj, comp in tau.components.items():
        tgt = tau.target.values[obj]
        full = lattice_sum(comp.matrix, tgt.relations)
        for i in range(tgt.ambient_rank):
            unit = [0] * tgt.ambient_rank
            unit[i] = 1
            if not lattice_contains(full, unit):
                return False
    return True


def module_to_json(module: CatModule):
    """Serialize values and actions; category data travels separately."""
    values = {}
    for obj in sorted(module.values):
        val = module.values[obj]
        values[str(obj)] = {
            "ambient": val.ambient_rank,
            "relations": [list(c) for c in val.relations.columns()],
            "factors": list(val.invariant_factors),
        }
    actions = {}
    for (a, b, j), mp in sorted(module.actions.items()):
        actions[f"{a},{b},{j}"] = mp.matrix.tolists()
    return {"variance": module.variance, "values": values, "actions": actions}


def module_from_json(category, data) -> CatModule:
    values = {}
    for key, val in data["values"].items():
        rels = IntMatrix.from_columns(val["relations"], rows=val["ambient"])
        values[int(key)] = FgAbelian.from_relations(val["ambient"], rels)
    variance = data.get("variance", "contra")
    actions = {}
    for key, rows in data["actions"].items():
        a, b, j = (int(p) for p in key.split(","))
        src_obj, tgt_obj = (b, a) if variance == "contra" else (a, b)
        src, tgt = values[src_obj], values[tgt_obj]
        mat = IntMatrix(rows, cols=src.ambient_rank) if rows else \
            IntMatrix.zeros(tgt.ambient_rank, src.ambient_rank)
        actions[(a, b, j)] = AbMap(src, tgt, mat)
    return CatModule(category, values, actions, variance)


class ChainComplex:
    """A complex of free modules over one category.

    ``cells[k]`` lists object indices of degree-k cells; ``entries[k]`` maps
    (col_cell, row_cell) to a combination in hom(obj(col), obj(row)) and
    describes the boundary F_k -> F_(k-1).
    """

    def __init__(self, category, cells, entries, check=True):
        self.category = category
        self.cells = [list(c) for c in cells]
        self.entries = [dict(e) for e in entries]
        self.frees = [FreeModule(category, c) for c in self.cells]
        if check:
            self.check_complex()

    def length(self):
        return len(self.cells) - 1

    def boundary_component(self, k: int, obj: int) -> AbMap:
        """The boundary F_k(obj) -> F_(k-1)(obj) as a matrix."""
        cat = self.category
        fk, fk1 = self.frees[k], self.frees[k - 1]
        rows = fk1.module.values[obj].ambient_rank
        cols = fk.module.values[obj].ambient_rank
        mat = [[0] * cols for _ in range(rows)]
        for (beta, alpha), combo in self.entries[k].items():
            b_obj = self.cells[k][beta]
            a_obj = self.cells[k - 1][alpha]
            for p in range(cat.hom_rank(obj, b_obj)):
                pushed = cat.compose(obj, b_obj, a_obj, ((p, 1),), combo)
                col = fk.basis_coordinate(obj, beta, p)
                for q, coeff in pushed:
                    mat[fk1.basis_coordinate(obj, alpha, q)][col] += coeff
        return AbMap(fk.module.values[obj], fk1.module.values[obj],
                     IntMatrix(mat, cols=cols))

    def check_complex(self):
        cat = self.category
        for k in range(2, len(self.cells)):
            for obj in range(cat.object_count()):
                two = self.boundary_component(k - 1, obj).compose(
                    self.boundary_component(k, obj))
                if not two.matrix.is_zero():
                    raise AxiomViolation(f"boundary squared nonzero at degree {k}")

    def to_json(self):
        out = {"cells": self.cells, "entries": []}
        for k, ent in enumerate(self.entries):
            out["entries"].append(
                [{"col": beta, "row": alpha, "combo": [list(t) for t in combo]}
                 for (beta, alpha), combo in sorted(ent.items())])
        return out


class Resolution(ChainComplex):
    """A free resolution of a module, with its augmentation."""

    def __init__(self, category, cells, entries, module, augmentation_images):
        super().__init__(category, cells, entries, check=False)
        self.module = module
        self.augmentation_images = augmentation_images  # per degree-0 cell
        self.check_complex()

    def augmentation(self) -> NatTrans:
        return yoneda_embed(self.frees[0], self.module, self.augmentation_images)

    def check_exact(self, through_degree=None) -> bool:
        """Exactness of F_* -> M at degrees 1..through (and surjectivity at 0)."""
        cat = self.category
        limit = self.length() if through_degree is None else through_degree
        aug = self.augmentation()
        for obj in range(cat.object_count()):
            # surjectivity onto M at every object
            img = lattice_sum(aug.components[obj].matrix,
                              self.module.values[obj].relations)
            full = lattice_sum(IntMatrix.identity(
                self.module.values[obj].ambient_rank))
            if img != full:
                return False
        for k in range(1, limit + 1):
            below = {}
            for obj in range(cat.object_count()):
                if k == 1:
                    ker = preimage_lattice(aug.components[obj])
                else:
                    ker = kernel_basis(self.boundary_component(k - 1, obj).matrix)
                below[obj] = hermite_column_basis(ker)
            im = generated_submodule(
                self.frees[k - 1].module,
                _boundary_image_seeds(self, k))
            for obj in range(cat.object_count()):
                if hermite_column_basis(im[obj]) != below[obj]:
                    return False
        return True


def _boundary_image_seeds(complex_, k):
    seeds = {}
    fk = complex_.frees[k]
    fk1 = complex_.frees[k - 1]
    for beta, b_obj in enumerate(complex_.cells[k]):
        vec = [0] * fk1.module.values[b_obj].ambient_rank
        for (beta2, alpha), combo in complex_.entries[k].items():
            if beta2 != beta:
                continue
            a_obj = complex_.cells[k - 1][alpha]
            for q, coeff in combo:
                vec[fk1.basis_coordinate(b_obj, alpha, q)] += coeff
        seeds.setdefault(b_obj, []).append(vec)
    return seeds


def free_resolution(category, module: CatModule, length: int,
                    rank_bound: int = 2048, prune: bool = True) -> Resolution:
    """Free resolution of a contravariant module to the requested length.

    Generators at each stage are Hermite basis vectors of the kernel in
    canonical object order; with ``prune`` (the default) vectors already
    inside the submodule generated by earlier choices are dropped, which
    keeps ranks small while staying deterministic.  Raises ResourceError if
    a stage would exceed ``rank_bound`` total cells.
    """
    if module.variance != "contra":
        raise ObjectMismatch("resolutions are for contravariant modules")
    cat = category
    n = cat.object_count()

    def choose_generators(host_module, lattices):
        # Scan objects with the largest stabilizers first: their generators
        # push down to smaller orbits, so the greedy prune bites sooner.
        chosen = []
        accepted_seeds = {}
        current = None
        for obj in reversed(range(n)):
            basis = hermite_column_basis(lattices[obj])
            for j in range(basis.cols):
                vec = basis.column(j)
                if prune and chosen:
                    if current is None:
                        current = generated_submodule(host_module, accepted_seeds)
                    if submodule_contains(current, obj, vec):
                        continue
                chosen.append((obj, vec))
                accepted_seeds.setdefault(obj, []).append(vec)
                current = None
        return chosen

    # Degree 0: cover the module itself.
    m_lattices = {obj: lattice_sum(
        IntMatrix.identity(module.values[obj].ambient_rank)) for obj in range(n)}
    gens0 = choose_generators(module, m_lattices)
    nonzero0 = []
    for obj, vec in gens0:
        if not module.values[obj].element_is_zero(vec):
            nonzero0.append((obj, vec))
    gens0 = nonzero0
    cells = [[obj for obj, _ in gens0]]
    aug_images = [vec for _, vec in gens0]
    entries = [dict()]
    frees = [FreeModule(cat, cells[0])]
    if len(cells[0]) > rank_bound:
        raise ResourceError("resolution degree 0 exceeds the rank bound")

    aug = yoneda_embed(frees[0], module, aug_images)

    prev_free = frees[0]
    prev_kernel = {obj: hermite_column_basis(preimage_lattice(aug.components[obj]))
                   for obj in range(n)}

    for k in range(1, length + 1):
        gens = choose_generators(prev_free.module, prev_kernel)
        gens = [(obj, vec) for obj, vec in gens if any(vec)]
        if len(gens) > rank_bound:
            raise ResourceError(f"resolution degree {k} exceeds the rank bound")
        cells.append([obj for obj, _ in gens])
        ent = {}
        for beta, (obj, vec) in enumerate(gens):
            for alpha, combo in enumerate(prev_free.decompose(obj, vec)):
                if combo:
                    ent[(beta, alpha)] = combo
        entries.append(ent)
        new_free = FreeModule(cat, cells[-1])
        # Kernel of the new boundary feeds the next round.
        next_kernel = {}
        temp = ChainComplex.__new__(ChainComplex)
        temp.category = cat
        temp.cells = cells
        temp.entries = entries
        temp.frees = frees + [new_free]
        for obj in range(n):
            mat = temp.boundary_component(k, obj)
            next_kernel[obj] = hermite_column_basis(kernel_basis(mat.matrix))
        frees.append(new_free)
        prev_free = new_free
        prev_kernel = next_kernel

    return Resolution(cat, cells, entries, module, aug_images)


def cohomology(complex_: ChainComplex, coefficients: CatModule, degree: int):
    """H^degree of Hom(complex, coefficients) as an FgAbelian.

    The cochain group in degree k is the direct sum of coefficient values at
    the degree-k cells; the differential applies the boundary entries through
    the coefficient actions (contravariantly).
    """
    if degree < 0 or degree > complex_.length():
        from .errors import DegreeOutOfRange
        raise DegreeOutOfRange(
            f"degree {degree} outside 0..{complex_.length()}")
    cat = complex_.category

    def cochain_group(k):
        rel_cols, starts = [], []
        total = 0
        for obj in complex_.cells[k]:
            starts.append(total)
            total += coefficients.values[obj].ambient_rank
        for idx, obj in enumerate(complex_.cells[k]):
            rel = coefficients.values[obj].relations
            for j in range(rel.cols):
                vec = [0] * total
                for r in range(rel.rows):
                    vec[starts[idx] + r] = rel.data[r][j]
                rel_cols.append(vec)
        return FgAbelian(total, IntMatrix.from_columns(rel_cols, rows=total)), starts

    def differential(k):
        """delta^k : C^k -> C^(k+1), from the boundary F_(k+1) -> F_k."""
        ck, starts_k = cochain_group(k)
        ck1, starts_k1 = cochain_group(k + 1)
        mat = [[0] * ck.ambient_rank for _ in range(ck1.ambient_rank)]
        for (beta, alpha), combo in complex_.entries[k + 1].items():
            b_obj = complex_.cells[k + 1][beta]
            a_obj = complex_.cells[k][alpha]
            step = coefficients.action(b_obj, a_obj, combo)  # M(a) -> M(b)
            for r in range(step.matrix.rows):
                for c in range(step.matrix.cols):
                    v = step.matrix.data[r][c]
                    if v:
                        mat[starts_k1[beta] + r][starts_k[alpha] + c] += v
        return AbMap(ck, ck1, IntMatrix(mat, cols=ck.ambient_rank))

    ck, _ = cochain_group(degree)
    if degree < complex_.length():
        delta_n = differential(degree)
        ker = preimage_lattice(delta_n)
    else:
        ker = lattice_sum(IntMatrix.identity(ck.ambient_rank))
    if degree == 0:
        im = IntMatrix.zeros(ck.ambient_rank, 0)
    else:
        im = differential(degree - 1).matrix
    num = lattice_sum(ker, ck.relations)
    den = lattice_sum(im, ck.relations)
    grp, _ = lattice_quotient(num, den)
    return grp
