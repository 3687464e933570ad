"""Mackey functors: restriction, induction, conjugation, and covers.

A Mackey functor for a finite group is stored as a module over the span
category from :mod:`bredonkit.cats`; the classical three-operation tables
(restriction R, induction/transfer I, conjugation c) are read off as the
actions of basic spans.  Building one the other way, from tables or from a
group representation, assembles each span's action as I after c after R and
then checks functoriality, which encodes the double coset axiom.

The module also carries the orbit-module side of the story: the coinduction
of a module off a single isotropy class, the unit comparing a module with
the product of its coinductions, and the resulting tower whose cokernels
climb the subgroup-length filtration.
"""

from __future__ import annotations

import random

from .cats import (
    OrbitMorphism,
    SubgroupEmbedding,
    express_span,
    inclusion_functor,
    mackey_category,
    orbit_category,
    orbit_to_mackey,
)
from .errors import (
    AxiomViolation,
    MismatchedParent,
    NotCohomological,
    NotNormal,
    ObjectMismatch,
    ResourceError,
)
from .fmod import (
    CatModule,
    NatTrans,
    cokernel_module,
    direct_sum_modules,
    free_module,
    hom_over_category,
    induce_along,
    coinduce_along,
    module_from_json,
    module_to_json,
    restrict_along,
)
from .grp import (
    Family,
    Group,
    QuotientData,
    SubgroupHandle,
    group_from_generators,
    weyl,
)
from .zmod import (
    AbMap,
    FgAbelian,
    IntMatrix,
    express_through_inclusion,
    kernel as abelian_kernel,
    lattice_sum,
    lattices_equal,
    preimage_lattice,
    random_unimodular,
    solve_matrix,
)


def _gen_element_ids(group: Group):
    return [group.index(p) for p in group.generators]


def _direct_sum_groups(groups):
    """Block sum of presented groups; returns (group, [(start, stop)])."""
    total = sum(g.ambient_rank for g in groups)
    offsets = []
    cols = []
    start = 0
    for g in groups:
        offsets.append((start, start + g.ambient_rank))
        for c in g.relations.columns():
            col = [0] * total
            col[start:start + g.ambient_rank] = list(c)
            cols.append(col)
        start += g.ambient_rank
    return FgAbelian.from_relations(
        total, IntMatrix.from_columns(cols, rows=total)), offsets


def _left_coset_reps(group: Group, k_members, l_members):
    """Minimal representatives of the cosets x*L inside K."""
    seen = set()
    reps = []
    for x in sorted(k_members):
        if x in seen:
            continue
        coset = {group.mul(x, l) for l in l_members}
        seen |= coset
        reps.append(min(coset))
    return reps


class GModule:
    """An integer representation: a presented abelian group with a left action.

    ``gen_actions`` maps generator element ids to AbMaps on ``value``; the
    table extends to every element by products and is then verified against
    all generator edges, which pins the whole homomorphism property.

    >>> from bredonkit.grp import group_from_generators
    >>> c2 = group_from_generators("(1 2)", name="C2")
    >>> GModule.regular(c2).value.invariant_factors
    (0, 0)
    >>> GModule.trivial(c2).action(1).matrix.tolists()
    [[1]]
    """

    def __init__(self, group: Group, value: FgAbelian, gen_actions, check=True):
        self.group = group
        self.value = value
        self._gen_ids = sorted(g for g in gen_actions if g != 0)
        act = {0: AbMap.identity(value)}
        frontier = [0]
        while frontier:
            step = []
            for a in frontier:
                for s in self._gen_ids:
                    t = group.mul(a, s)
                    if t not in act:
                        act[t] = act[a].compose(gen_actions[s])
                        step.append(t)
            frontier = step
        if len(act) != group.order:
            raise AxiomViolation("generator actions do not cover the group")
        for s, given in gen_actions.items():
            if not act[s].equal_to(given):
                raise AxiomViolation(f"action of generator {s} is inconsistent")
        self.act = act
        if check:
            self.validate()

    def action(self, g: int) -> AbMap:
        return self.act[g]

    def validate(self):
        for g, m in self.act.items():
            if not m.well_formed():
                raise AxiomViolation(f"action of element {g} breaks relations")
        for a in range(self.group.order):
            for s in self._gen_ids or [0]:
                lhs = self.act[self.group.mul(a, s)]
                if not lhs.equal_to(self.act[a].compose(self.act[s])):
                    raise AxiomViolation(
                        f"action is not multiplicative at ({a}, {s})")
        return True

    @staticmethod
    def trivial(group: Group, fiber: FgAbelian = None) -> "GModule":
        fiber = fiber or FgAbelian.free(1)
        gens = {s: AbMap.identity(fiber) for s in _gen_element_ids(group)}
        return GModule(group, fiber, gens, check=False)

    @staticmethod
    def regular(group: Group) -> "GModule":
        """Left multiplication on the free group ring basis."""
        n = group.order
        value = FgAbelian.free(n)
        gens = {}
        for s in _gen_element_ids(group):
            mat = [[0] * n for _ in range(n)]
            for x in range(n):
                mat[group.mul(s, x)][x] = 1
            gens[s] = AbMap(value, value, IntMatrix(mat))
        return GModule(group, value, gens, check=False)

    @staticmethod
    def permutation(group: Group, handle: SubgroupHandle) -> "GModule":
        return _permutation_data(group, handle)[0]

    @staticmethod
    def one_dimensional(group: Group, kernel_handle: SubgroupHandle) -> "GModule":
        """Rank one, elements outside the kernel acting by -1."""
        fiber = FgAbelian.free(1)
        gens = {}
        for s in _gen_element_ids(group):
            sign = 1 if kernel_handle.contains(s) else -1
            gens[s] = AbMap(fiber, fiber, IntMatrix([[sign]]))
        return GModule(group, fiber, gens)

    @staticmethod
    def direct_sum(mods) -> "GModule":
        group = mods[0].group
        for m in mods:
            if m.group is not group:
                raise MismatchedParent("summands live over different groups")
        value, offsets = _direct_sum_groups([m.value for m in mods])
        gens = {}
        for s in _gen_element_ids(group):
            mat = [[0] * value.ambient_rank for _ in range(value.ambient_rank)]
            for m, (lo, _) in zip(mods, offsets):
                block = m.action(s).matrix
                for r in range(block.rows):
                    for c in range(block.cols):
                        mat[lo + r][lo + c] = block.data[r][c]
            gens[s] = AbMap(value, value, IntMatrix(mat, cols=value.ambient_rank))
        return GModule(group, value, gens, check=False)

    def restricted_to(self, emb: SubgroupEmbedding) -> "GModule":
        sub = emb.subgroup
        gens = {i: self.act[emb.to_parent[i]] for i in _gen_element_ids(sub)}
        return GModule(sub, self.value, gens, check=False)

    def fixed_points(self, members):
        """Kernel of the stacked (action - id) over the given element ids.

        Returns (group, inclusion into the value).
        """
        ids = [g for g in members if g != 0] or [0]
        blocks = [self.act[g].matrix - IntMatrix.identity(self.value.ambient_rank)
                  for g in ids]
        stacked = blocks[0]
        for b in blocks[1:]:
            stacked = stacked.vstack(b)
        target, _ = _direct_sum_groups([self.value] * len(blocks))
        return abelian_kernel(AbMap(self.value, target, stacked))


def _permutation_data(group: Group, handle: SubgroupHandle):
    """Permutation module on left cosets x*H, plus the coset rep list."""
    members = handle.members
    seen = set()
    reps = []
    coset_of = {}
    for x in range(group.order):
        if x in seen:
            continue
        coset = {group.mul(x, h) for h in members}
        seen |= coset
        for y in coset:
            coset_of[y] = len(reps)
        reps.append(min(coset))
    n = len(reps)
    value = FgAbelian.free(n)
    gens = {}
    for s in _gen_element_ids(group):
        mat = [[0] * n for _ in range(n)]
        for c in range(n):
            mat[coset_of[group.mul(s, reps[c])]][c] = 1
        gens[s] = AbMap(value, value, IntMatrix(mat))
    return GModule(group, value, gens, check=False), reps, coset_of


def random_gmodule(group: Group, rng: random.Random, max_index: int = 4) -> GModule:
    """A deterministic pseudo-random representation for test batteries.

    Conjugating a permutation block (plus an optional one-dimensional sign
    block) by a random unimodular matrix keeps the action integral and the
    homomorphism property intact while scrambling every individual table.
    """
    candidates = [sid for sid, mem in enumerate(group.subgroups)
                  if group.order // len(mem) <= max_index]
    handle = SubgroupHandle(group, rng.choice(candidates))
    base = GModule.permutation(group, handle)
    index_two = [sid for sid, mem in enumerate(group.subgroups)
                 if group.order == 2 * len(mem)]
    if index_two and rng.random() < 0.5:
        sign = GModule.one_dimensional(
            group, SubgroupHandle(group, rng.choice(index_two)))
        base = GModule.direct_sum([base, sign])
    n = base.value.ambient_rank
    u = random_unimodular(n, rng)
    u_inv = solve_matrix(u, IntMatrix.identity(n))
    gens = {s: AbMap(base.value, base.value, u * base.action(s).matrix * u_inv)
            for s in _gen_element_ids(group)}
    return GModule(group, base.value, gens, check=False)


def gmodule_coinduce(emb: SubgroupEmbedding, gmod: GModule) -> GModule:
    """Equivariant maps out of the big group: blocks indexed by N\\G cosets."""
    if gmod.group is not emb.subgroup:
        raise MismatchedParent("module must live over the embedded subgroup")
    parent = emb.parent
    n_members = set(emb.to_parent)
    to_local = {p: i for i, p in enumerate(emb.to_parent)}
    seen = set()
    reps = []
    coset_of = {}
    for x in range(parent.order):
        if x in seen:
            continue
        coset = {parent.mul(n, x) for n in n_members}
        seen |= coset
        for y in coset:
            coset_of[y] = len(reps)
        reps.append(min(coset))
    value, offsets = _direct_sum_groups([gmod.value] * len(reps))
    amb = gmod.value.ambient_rank
    gens = {}
    for s in _gen_element_ids(parent):
        mat = [[0] * value.ambient_rank for _ in range(value.ambient_rank)]
        for i, r in enumerate(reps):
            moved = parent.mul(r, s)
            j = coset_of[moved]
            twist = parent.mul(moved, parent.inv[reps[j]])
            block = gmod.action(to_local[twist]).matrix
            lo_r, lo_c = offsets[i][0], offsets[j][0]
            for rr in range(amb):
                for cc in range(amb):
                    mat[lo_r + rr][lo_c + cc] = block.data[rr][cc]
        gens[s] = AbMap(value, value, IntMatrix(mat, cols=value.ambient_rank))
    return GModule(parent, value, gens)


def gmodule_induce(emb: SubgroupEmbedding, gmod: GModule) -> GModule:
    """Group ring tensor: blocks indexed by G/N cosets, twisted on the right."""
    if gmod.group is not emb.subgroup:
        raise MismatchedParent("module must live over the embedded subgroup")
    parent = emb.parent
    n_members = set(emb.to_parent)
    to_local = {p: i for i, p in enumerate(emb.to_parent)}
    seen = set()
    reps = []
    coset_of = {}
    for x in range(parent.order):
        if x in seen:
            continue
        coset = {parent.mul(x, n) for n in n_members}
        seen |= coset
        for y in coset:
            coset_of[y] = len(reps)
        reps.append(min(coset))
    value, offsets = _direct_sum_groups([gmod.value] * len(reps))
    amb = gmod.value.ambient_rank
    gens = {}
    for s in _gen_element_ids(parent):
        mat = [[0] * value.ambient_rank for _ in range(value.ambient_rank)]
        for i, r in enumerate(reps):
            moved = parent.mul(s, r)
            j = coset_of[moved]
            twist = parent.mul(parent.inv[reps[j]], moved)
            block = gmod.action(to_local[twist]).matrix
            lo_r, lo_c = offsets[j][0], offsets[i][0]
            for rr in range(amb):
                for cc in range(amb):
                    mat[lo_r + rr][lo_c + cc] = block.data[rr][cc]
        gens[s] = AbMap(value, value, IntMatrix(mat, cols=value.ambient_rank))
    return GModule(parent, value, gens)


_one_object_cats = {}


def gmodule_as_module(gmod: GModule) -> CatModule:
    """The same data as a module over the one-object orbit category."""
    cat = orbit_category(gmod.group, Family.trivial(gmod.group))
    basis = cat.hom_basis[(0, 0)]
    actions = {(0, 0, i): gmod.action(m.coset_rep) for i, m in enumerate(basis)}
    return CatModule(cat, {0: gmod.value}, actions)


def equivariant_hom(source: GModule, target: GModule):
    """The group of equivariant maps, via the one-object category."""
    if source.group is not target.group:
        raise MismatchedParent("equivariant maps need one group")
    return hom_over_category(
        gmodule_as_module(source), gmodule_as_module(target))


class _SpanActions(dict):
    """Action table filled in on first access; keys are (a, b, basis_idx)."""

    def __init__(self, factory):
        super().__init__()
        self.factory = factory

    def __missing__(self, key):
        value = self.factory(key)
        self[key] = value
        return value


class MackeyFunctor:
    """A module over the span category, with table-style accessors.

    ``res``, ``ind`` and ``conj`` accept arbitrary subgroup ids; values at a
    subgroup are identified with the value at its class representative
    through a fixed conjugator, so composites of accessor maps remain
    consistent.
    """

    def __init__(self, category, module: CatModule, check=True):
        if category.flavor != "mackey":
            raise ObjectMismatch("a Mackey functor needs the span category")
        if module.category is not category or module.variance != "contra":
            raise ObjectMismatch("module does not match the span category")
        self.category = category
        self.module = module
        self.group = category.group
        self.family = category.family
        if check:
            module.validate()

    def class_object(self, sub_id: int) -> int:
        cls = self.group.class_of_subgroup(sub_id)
        if cls not in self.category.obj_index:
            raise ObjectMismatch("subgroup class outside the family")
        return self.category.obj_index[cls]

    def value(self, sub_id: int) -> FgAbelian:
        return self.module.values[self.class_object(sub_id)]

    def _span_map(self, src_sub, mid_sub, twist, tgt_sub) -> AbMap:
        self.class_object(src_sub)
        self.class_object(tgt_sub)
        ai, bi, span = express_span(
            self.category, src_sub, mid_sub, twist, tgt_sub)
        idx = self.category.index_of(ai, bi, span)
        return self.module.action(ai, bi, ((idx, 1),))

    def res(self, k_sub: int, h_sub: int) -> AbMap:
        """Restriction value(K) -> value(H) for H inside K."""
        return self._span_map(h_sub, h_sub, 0, k_sub)

    def ind(self, h_sub: int, k_sub: int) -> AbMap:
        """Induction (transfer) value(H) -> value(K) for H inside K."""
        return self._span_map(k_sub, h_sub, 0, h_sub)

    def conj(self, g: int, h_sub: int) -> AbMap:
        """Conjugation value(H) -> value(gHg^-1)."""
        moved = self.group.conj_subgroup(g, h_sub)
        return self._span_map(moved, moved, g, h_sub)

    def is_cohomological(self) -> bool:
        """Induction after restriction acts as the subgroup index everywhere."""
        subs = self.group.subgroups
        for k_id, k_mem in enumerate(subs):
            if not self.family.contains_subgroup(k_id):
                continue
            for h_id, h_mem in enumerate(subs):
                if h_id == k_id or not h_mem <= k_mem:
                    continue
                if not self.family.contains_subgroup(h_id):
                    continue
                index = len(k_mem) // len(h_mem)
                word = self.ind(h_id, k_id).compose(self.res(k_id, h_id))
                val = self.value(k_id)
                scaled = AbMap(val, val,
                               IntMatrix.identity(val.ambient_rank) * index)
                if not word.equal_to(scaled):
                    return False
        return True

    def to_orbit_module(self, family: Family = None) -> CatModule:
        """Forget transfers: restrict along orbit -> span.

        With ``family`` (a subfamily of the functor's own), the result lives
        over the smaller orbit category; values and actions are read off the
        same span data, so no transfer information leaks in.
        """
        if family is None or family.class_ids == self.family.class_ids:
            orb = orbit_category(self.group, self.family)
            return restrict_along(orbit_to_mackey(orb, self.category), self.module)
        if family.parent is not self.group:
            raise MismatchedParent("family belongs to a different group")
        if not family.class_ids <= self.family.class_ids:
            raise ObjectMismatch(
                "requested family is not contained in the functor's family")
        orb = orbit_category(self.group, family)
        values = {i: self.value(orb.rep_sub[i])
                  for i in range(orb.object_count())}
        actions = {}
        for (a, b), basis in orb.hom_basis.items():
            for j, m in enumerate(basis):
                # orbit map with coset x*K corresponds to the transfer-free
                # span (H <- H, twist x -> K)
                actions[(a, b, j)] = self._span_map(
                    orb.rep_sub[a], orb.rep_sub[a], m.coset_rep, orb.rep_sub[b])
        return CatModule(orb, values, actions)

    def is_zero(self) -> bool:
        return self.module.is_zero()

    def summary(self):
        return {int(self.category.objects[obj]): self.module.values[obj].summary()
                for obj in sorted(self.module.values)}

    def to_json(self):
        return {
            "group": self.group.to_json(),
            "family": sorted(self.family.class_ids),
            "module": module_to_json(self.module),
        }


def mackey_from_json(data) -> MackeyFunctor:
    group = group_from_generators(data["group"]["generators"])
    family = Family(group, data["family"])
    cat = mackey_category(group, family)
    module = module_from_json(cat, data["module"])
    return MackeyFunctor(cat, module, check=False)


def _span_module_from_raw(group, family, value_fn, res_fn, ind_fn, conj_fn,
                          validate=True):
    """Assemble a span module from three-operation tables.

    Each basic span (S <- L, twist g -> K) acts by I[L -> S] after c_g after
    R[K -> L'] with L' the g-conjugate of L back inside K.  Validation runs
    the full functoriality check, which is exactly the double coset axiom.
    """
    cat = mackey_category(group, family)
    values = {i: value_fn(cat.rep_sub[i]) for i in range(cat.object_count())}

    def build(key):
        a, b, i = key
        sp = cat.hom_basis[(a, b)][i]
        lp = group.conj_subgroup(group.inv[sp.twist], sp.middle)
        word = ind_fn(sp.middle, cat.rep_sub[a]).compose(
            conj_fn(sp.twist, lp)).compose(res_fn(cat.rep_sub[b], lp))
        return AbMap(values[b], values[a], word.matrix)

    actions = _SpanActions(build)
    module = CatModule(cat, values, actions)
    if validate:
        for (a, b), basis in cat.hom_basis.items():
            for i in range(len(basis)):
                actions[(a, b, i)]
        module.validate()
    return cat, module


def fixed_point_functor(gmod: GModule, family: Family = None,
                        validate=True) -> MackeyFunctor:
    """Invariants at every subgroup, with orbit-sum transfers.

    >>> from bredonkit.grp import group_from_generators
    >>> c2 = group_from_generators("(1 2)", name="C2")
    >>> m = fixed_point_functor(GModule.regular(c2))
    >>> m.value(0).invariant_factors, m.value(1).invariant_factors
    ((0, 0), (0,))
    >>> top = c2.subgroup_id([0, 1])
    >>> m.ind(0, top).compose(m.res(top, 0)).matrix.tolists()
    [[2]]
    """
    group = gmod.group
    family = family or Family.all(group)
    fixed = {}
    for sid in family.member_subgroup_ids():
        handle = SubgroupHandle(group, sid)
        fixed[sid] = gmod.fixed_points(handle.generating_ids())

    def value_fn(sid):
        return fixed[sid][0]

    def res_fn(k, l):
        return express_through_inclusion(fixed[l][1], fixed[k][1])

    def ind_fn(l, k):
        reps = _left_coset_reps(group, group.subgroups[k], group.subgroups[l])
        total = gmod.action(reps[0])
        for x in reps[1:]:
            total = total + gmod.action(x)
        return express_through_inclusion(
            fixed[k][1], total.compose(fixed[l][1]))

    def conj_fn(g, h):
        moved = group.conj_subgroup(g, h)
        return express_through_inclusion(
            fixed[moved][1], gmod.action(g).compose(fixed[h][1]))

    cat, module = _span_module_from_raw(
        group, family, value_fn, res_fn, ind_fn, conj_fn, validate=validate)
    return MackeyFunctor(cat, module, check=False)


def coinvariance_functor(gmod: GModule, family: Family = None,
                         validate=True) -> MackeyFunctor:
    """Coinvariants at every subgroup: projections down, transfers up.

    All values share the ambient presentation of the underlying module, with
    the subgroup's augmentation relations added; restriction is the sum of
    inverse translates, which is well defined on classes.
    """
    group = gmod.group
    family = family or Family.all(group)
    amb = gmod.value.ambient_rank
    values = {}
    for sid in family.member_subgroup_ids():
        handle = SubgroupHandle(group, sid)
        cols = list(gmod.value.relations.columns())
        for s in handle.generating_ids():
            diff = gmod.action(s).matrix - IntMatrix.identity(amb)
            cols.extend(diff.columns())
        values[sid] = FgAbelian.from_relations(
            amb, IntMatrix.from_columns(cols, rows=amb))

    def value_fn(sid):
        return values[sid]

    def res_fn(k, l):
        reps = _left_coset_reps(group, group.subgroups[k], group.subgroups[l])
        total = gmod.action(group.inv[reps[0]]).matrix
        for x in reps[1:]:
            total = total + gmod.action(group.inv[x]).matrix
        return AbMap(values[k], values[l], total)

    def ind_fn(l, k):
        return AbMap(values[l], values[k], IntMatrix.identity(amb))

    def conj_fn(g, h):
        return AbMap(values[h], values[group.conj_subgroup(g, h)],
                     gmod.action(g).matrix)

    cat, module = _span_module_from_raw(
        group, family, value_fn, res_fn, ind_fn, conj_fn, validate=validate)
    return MackeyFunctor(cat, module, check=False)


def burnside_functor(group: Group) -> MackeyFunctor:
    """The representable span module at the one-point orbit."""
    family = Family.all(group)
    cat = mackey_category(group, family)
    free = free_module(cat, [cat.object_count() - 1])
    return MackeyFunctor(cat, free.module, check=False)


def _as_abmap(entry, source, target):
    if isinstance(entry, AbMap):
        return entry
    mat = entry if isinstance(entry, IntMatrix) else \
        IntMatrix(entry, cols=source.ambient_rank)
    return AbMap(source, target, mat)


def mackey_from_tables(data, validate=True) -> MackeyFunctor:
    """Build a Mackey functor from value and operation tables.

    ``data`` carries a group (or generator string), a family spec ("all",
    "trivial", or class ids), ``values`` keyed by subgroup id, and ``res``,
    ``ind``, ``conj`` tables keyed by subgroup or (element, subgroup) pairs.
    Tables are completed by transitivity and products; anything still
    missing, and any axiom failure, raises AxiomViolation.
    """
    group = data["group"]
    if not isinstance(group, Group):
        group = group_from_generators(group)
    fam = data.get("family", "all")
    if isinstance(fam, Family):
        family = fam
    elif fam == "all":
        family = Family.all(group)
    elif fam == "trivial":
        family = Family.trivial(group)
    else:
        family = Family(group, fam)

    member_ids = family.member_subgroup_ids()
    values = {}
    for sid in member_ids:
        cls_rep = group.class_rep(group.class_of_subgroup(sid))
        raw = data["values"].get(sid, data["values"].get(cls_rep))
        if raw is None:
            raise AxiomViolation(f"no value given for subgroup {sid}")
        values[sid] = raw if isinstance(raw, FgAbelian) else \
            FgAbelian.from_factors(raw)

    res = {}
    ind = {}
    conj = {}
    for (k, l), entry in data.get("res", {}).items():
        res[(k, l)] = _as_abmap(entry, values[k], values[l])
    for (l, k), entry in data.get("ind", {}).items():
        ind[(l, k)] = _as_abmap(entry, values[l], values[k])
    for (g, h), entry in data.get("conj", {}).items():
        conj[(g, h)] = _as_abmap(
            entry, values[h], values[group.conj_subgroup(g, h)])
    for sid in member_ids:
        res.setdefault((sid, sid), AbMap.identity(values[sid]))
        ind.setdefault((sid, sid), AbMap.identity(values[sid]))
        conj.setdefault((0, sid), AbMap.identity(values[sid]))

    subs = group.subgroups
    nested = [(k, l) for k in member_ids for l in member_ids
              if subs[l] <= subs[k]]
    changed = True
    while changed:
        changed = False
        for (k, l) in nested:
            for m in member_ids:
                if not (subs[l] <= subs[m] and subs[m] <= subs[k]):
                    continue
                if (k, l) not in res and (k, m) in res and (m, l) in res:
                    res[(k, l)] = res[(m, l)].compose(res[(k, m)])
                    changed = True
                if (l, k) not in ind and (l, m) in ind and (m, k) in ind:
                    ind[(l, k)] = ind[(m, k)].compose(ind[(l, m)])
                    changed = True
        for (g, h) in list(conj):
            for (s, h2) in list(conj):
                if h2 != group.conj_subgroup(g, h):
                    continue
                t = group.mul(s, g)
                if (t, h) not in conj:
                    conj[(t, h)] = conj[(s, h2)].compose(conj[(g, h)])
                    changed = True

    def res_fn(k, l):
        if (k, l) not in res:
            raise AxiomViolation(f"tables do not determine restriction {k}->{l}")
        return res[(k, l)]

    def ind_fn(l, k):
        if (l, k) not in ind:
            raise AxiomViolation(f"tables do not determine induction {l}->{k}")
        return ind[(l, k)]

    def conj_fn(g, h):
        if (g, h) not in conj:
            raise AxiomViolation(
                f"tables do not determine conjugation by {g} at {h}")
        return conj[(g, h)]

    cat, module = _span_module_from_raw(
        group, family, lambda sid: values[sid], res_fn, ind_fn, conj_fn,
        validate=validate)
    return MackeyFunctor(cat, module, check=False)


def mackey_induce(emb: SubgroupEmbedding, mf: MackeyFunctor,
                  validate=False) -> MackeyFunctor:
    """Left Kan extension along the span-category inclusion."""
    if mf.group is not emb.subgroup:
        raise ObjectMismatch("functor does not live over the embedded subgroup")
    big = mackey_category(emb.parent, emb.parent_family)
    functor = inclusion_functor(emb, mf.category, big)
    return MackeyFunctor(big, induce_along(functor, mf.module), check=validate)


def mackey_coinduce(emb: SubgroupEmbedding, mf: MackeyFunctor,
                    validate=False) -> MackeyFunctor:
    """Right Kan extension along the span-category inclusion."""
    if mf.group is not emb.subgroup:
        raise ObjectMismatch("functor does not live over the embedded subgroup")
    big = mackey_category(emb.parent, emb.parent_family)
    functor = inclusion_functor(emb, mf.category, big)
    return MackeyFunctor(big, coinduce_along(functor, mf.module), check=validate)


_quotient_cache = {}


def quotient_data(group: Group, normal: SubgroupHandle) -> QuotientData:
    """Cached quotient realization, so repeated calls share the same Group."""
    if not normal.is_normal_in(group.full_handle()):
        raise NotNormal("subgroup is not normal in the whole group")
    key = (id(group), normal.sub_id)
    if key not in _quotient_cache:
        _quotient_cache[key] = QuotientData(group, normal, group.full_handle())
    return _quotient_cache[key]


def inflation(group: Group, normal: SubgroupHandle, n_functor: MackeyFunctor,
              validate=True) -> MackeyFunctor:
    """Pull a quotient-group Mackey functor back; zero below the kernel.

    The quotient side must be built over ``quotient_data(group, normal).group``
    with the full family.  Values at subgroups not containing the kernel are
    zero, which keeps every operation well defined.
    """
    qd = quotient_data(group, normal)
    if n_functor.group is not qd.group:
        raise ObjectMismatch(
            "build the quotient-side functor over quotient_data(...).group")
    if not n_functor.family.is_all():
        raise ObjectMismatch("inflation expects the full family upstairs")
    k_members = frozenset(normal.members)
    qgrp = qd.group
    subs = group.subgroups

    proj_cache = {}

    def proj_sub(sid):
        if sid not in proj_cache:
            proj_cache[sid] = qgrp.subgroup_id(
                frozenset(qd.project[x] for x in subs[sid]))
        return proj_cache[sid]

    def has_kernel(sid):
        return k_members <= subs[sid]

    def value_fn(sid):
        return n_functor.value(proj_sub(sid)) if has_kernel(sid) else \
            FgAbelian.zero()

    def res_fn(k, l):
        if has_kernel(l):
            return n_functor.res(proj_sub(k), proj_sub(l))
        return AbMap.zero(value_fn(k), value_fn(l))

    def ind_fn(l, k):
        if has_kernel(l):
            return n_functor.ind(proj_sub(l), proj_sub(k))
        return AbMap.zero(value_fn(l), value_fn(k))

    def conj_fn(g, h):
        if has_kernel(h):
            return n_functor.conj(qd.project[g], proj_sub(h))
        return AbMap.zero(value_fn(h),
                          value_fn(group.conj_subgroup(g, h)))

    cat, module = _span_module_from_raw(
        group, Family.all(group), value_fn, res_fn, ind_fn, conj_fn,
        validate=validate)
    return MackeyFunctor(cat, module, check=False)


def _perm_fixed_point_functor(group: Group, family: Family, blocks,
                              validate=False):
    """Fixed points of a sum of coset permutation modules, combinatorially.

    ``blocks`` is a list of (handle, coset_reps); the value at K is free on
    the K-orbits of all cosets, restriction refines orbits, induction sums
    with stabilizer-index multiplicity, and conjugation relabels.  Returns
    (MackeyFunctor, per-subgroup orbit data) where the orbit data lists
    (block, coset indices, minimal coset) per basis vector.
    """
    n_blocks = []
    for handle, reps in blocks:
        members = handle.members
        coset_of = {}
        for idx, r in enumerate(reps):
            for h in members:
                coset_of[group.mul(r, h)] = idx
        n_blocks.append((handle, reps, coset_of))

    orbit_data = {}

    def orbits_at(sid):
        if sid in orbit_data:
            return orbit_data[sid]
        k_members = sorted(group.subgroups[sid])
        per = []
        for b, (handle, reps, coset_of) in enumerate(n_blocks):
            seen = set()
            for c in range(len(reps)):
                if c in seen:
                    continue
                orb = {coset_of[group.mul(k, reps[c])] for k in k_members}
                seen |= orb
                per.append((b, frozenset(orb), min(orb)))
        orbit_data[sid] = per
        return per

    def value_fn(sid):
        return FgAbelian.free(len(orbits_at(sid)))

    def res_fn(k, l):
        k_orbs = orbits_at(k)
        l_orbs = orbits_at(l)
        mat = [[0] * len(k_orbs) for _ in range(len(l_orbs))]
        for col, (b, orb, _) in enumerate(k_orbs):
            for row, (b2, orb2, _) in enumerate(l_orbs):
                if b2 == b and orb2 <= orb:
                    mat[row][col] = 1
        return AbMap(value_fn(k), value_fn(l),
                     IntMatrix(mat, cols=len(k_orbs)))

    def ind_fn(l, k):
        l_orbs = orbits_at(l)
        k_orbs = orbits_at(k)
        index = len(group.subgroups[k]) // len(group.subgroups[l])
        mat = [[0] * len(l_orbs) for _ in range(len(k_orbs))]
        for col, (b, orb, _) in enumerate(l_orbs):
            for row, (b2, orb2, _) in enumerate(k_orbs):
                if b2 == b and orb <= orb2:
                    mat[row][col] = index * len(orb) // len(orb2)
        return AbMap(value_fn(l), value_fn(k),
                     IntMatrix(mat, cols=len(l_orbs)))

    def conj_fn(g, h):
        moved = group.conj_subgroup(g, h)
        h_orbs = orbits_at(h)
        m_orbs = orbits_at(moved)
        mat = [[0] * len(h_orbs) for _ in range(len(m_orbs))]
        for col, (b, orb, rep) in enumerate(h_orbs):
            handle, reps, coset_of = n_blocks[b]
            target = coset_of[group.mul(g, reps[rep])]
            for row, (b2, orb2, _) in enumerate(m_orbs):
                if b2 == b and target in orb2:
                    mat[row][col] = 1
        return AbMap(value_fn(h), value_fn(moved),
                     IntMatrix(mat, cols=len(h_orbs)))

    cat, module = _span_module_from_raw(
        group, family, value_fn, res_fn, ind_fn, conj_fn, validate=validate)
    return MackeyFunctor(cat, module, check=False), orbits_at


def fixed_point_cover(mf: MackeyFunctor, validate=False):
    """A surjection onto a cohomological functor from a fixed-point source.

    One permutation block per (isotropy class, value generator); the
    component sends each orbit-sum basis vector through the induction,
    conjugation, restriction word picked out by its minimal coset.  Returns
    (source functor, the natural surjection).
    """
    if not mf.is_cohomological():
        raise NotCohomological("cover requires a cohomological Mackey functor")
    group = mf.group
    cat = mf.category
    blocks = []
    owners = []
    for obj in range(cat.object_count()):
        handle = SubgroupHandle(group, cat.rep_sub[obj])
        _, reps, _ = _permutation_data(group, handle)
        for t in range(mf.module.values[obj].ambient_rank):
            gen = [0] * mf.module.values[obj].ambient_rank
            gen[t] = 1
            blocks.append((handle, reps))
            owners.append((obj, gen))
    source, orbits_at = _perm_fixed_point_functor(
        group, mf.family, blocks, validate=validate)
    components = {}
    for obj in range(cat.object_count()):
        k_rep = cat.rep_sub[obj]
        k_members = group.subgroups[k_rep]
        cols = []
        for b, orb, rep in orbits_at(k_rep):
            h_obj, gen = owners[b]
            handle, reps = blocks[b]
            x = reps[rep]
            h_members = group.subgroups[handle.sub_id]
            mid = group.subgroup_id(
                k_members & frozenset(group.conj(x, h) for h in h_members))
            back = group.conj_subgroup(group.inv[x], mid)
            word = mf.ind(mid, k_rep).compose(
                mf.conj(x, back)).compose(mf.res(handle.sub_id, back))
            cols.append(word.matrix.apply(gen))
        components[obj] = AbMap(
            source.module.values[obj], mf.module.values[obj],
            IntMatrix.from_columns(
                cols, rows=mf.module.values[obj].ambient_rank))
    tau = NatTrans(source.module, mf.module, components)
    return source, tau


def xi(module: CatModule):
    """Minimal subgroup length over the support; infinity for zero modules.

    >>> from bredonkit.grp import group_from_generators, Family
    >>> from bredonkit.fmod import constant_module
    >>> from bredonkit.cats import orbit_category
    >>> s3 = group_from_generators("(1 2), (1 2 3)", name="S3")
    >>> xi(constant_module(orbit_category(s3, Family.all(s3))))
    0
    """
    cat = module.category
    lengths = cat.group.subgroup_lengths
    found = [lengths[cat.rep_sub[obj]]
             for obj in range(cat.object_count())
             if not module.values[obj].is_trivial()]
    return min(found) if found else float("inf")


def _dh_with_unit(module: CatModule, class_id: int):
    """Coinduction off one isotropy class, with the comparison unit.

    The value at K collects equivariant tuples over hom(H, K): one block per
    Weyl orbit, each block the fixed points of the orbit stabilizer acting on
    the value at H.  Returns (module, {obj: unit AbMap}).
    """
    cat = module.category
    if cat.flavor != "orbit":
        raise ObjectMismatch("tower construction lives over the orbit category")
    group = cat.group
    if class_id not in cat.obj_index:
        raise ObjectMismatch("class outside the family")
    h_obj = cat.obj_index[class_id]
    h_rep = cat.rep_sub[h_obj]
    fiber = module.values[h_obj]
    qd = weyl(group, SubgroupHandle(group, h_rep))
    w_grp = qd.group
    h_members = sorted(group.subgroups[h_rep])

    act_idx = []
    rho = []
    for w in range(w_grp.order):
        x = qd.section(w)
        rep = min(group.mul(x, h) for h in h_members)
        idx = cat.index_of(h_obj, h_obj, OrbitMorphism(h_obj, h_obj, rep))
        act_idx.append(idx)
        rho.append(module.action(h_obj, h_obj, ((idx, 1),)))

    per_obj = {}
    values = {}
    offsets = {}
    for k in range(cat.object_count()):
        rank = cat.hom_rank(h_obj, k)
        if rank == 0 or fiber.is_trivial():
            per_obj[k] = []
            values[k] = FgAbelian.zero()
            offsets[k] = []
            continue
        perms = []
        for w in range(w_grp.order):
            perms.append([cat.compose_basis(h_obj, h_obj, k, act_idx[w], phi)[0][0]
                          for phi in range(rank)])
        covered = [False] * rank
        orbits = []
        for phi in range(rank):
            if covered[phi]:
                continue
            witness = {phi: 0}
            queue = [phi]
            covered[phi] = True
            while queue:
                cur = queue.pop()
                for w in range(w_grp.order):
                    nxt = perms[w][cur]
                    if nxt not in witness:
                        witness[nxt] = w_grp.mul(w, witness[cur])
                        covered[nxt] = True
                        queue.append(nxt)
            stab = [w for w in range(w_grp.order) if perms[w][phi] == phi]
            gens = SubgroupHandle(
                w_grp, w_grp.subgroup_id(stab)).generating_ids()
            blocks = [rho[s].matrix - IntMatrix.identity(fiber.ambient_rank)
                      for s in gens]
            stacked = blocks[0]
            for bl in blocks[1:]:
                stacked = stacked.vstack(bl)
            target, _ = _direct_sum_groups([fiber] * len(blocks))
            grp, incl = abelian_kernel(AbMap(fiber, target, stacked))
            orbits.append({"rep": phi, "witness": witness,
                           "group": grp, "incl": incl})
        per_obj[k] = orbits
        value, offs = _direct_sum_groups([o["group"] for o in orbits])
        values[k] = value
        offsets[k] = offs

    member_of = {}
    for k, orbits in per_obj.items():
        table = {}
        for pos, orb in enumerate(orbits):
            for phi in orb["witness"]:
                table[phi] = pos
        member_of[k] = table

    actions = {}
    for (a, b), basis in cat.hom_basis.items():
        for j in range(len(basis)):
            rows = values[a].ambient_rank
            cols_n = values[b].ambient_rank
            mat = [[0] * cols_n for _ in range(rows)]
            for pos_a, orb_a in enumerate(per_obj[a]):
                moved = cat.compose_basis(
                    h_obj, a, b, orb_a["rep"], j)[0][0]
                pos_b = member_of[b][moved]
                orb_b = per_obj[b][pos_b]
                w = orb_b["witness"][moved]
                carried = AbMap(orb_b["group"], fiber,
                                rho[w].matrix * orb_b["incl"].matrix)
                block = express_through_inclusion(orb_a["incl"], carried)
                r0 = offsets[a][pos_a][0]
                c0 = offsets[b][pos_b][0]
                bm = block.matrix
                for r in range(bm.rows):
                    for c in range(bm.cols):
                        mat[r0 + r][c0 + c] = bm.data[r][c]
            actions[(a, b, j)] = AbMap(values[b], values[a],
                                       IntMatrix(mat, cols=cols_n))
    result = CatModule(cat, values, actions)

    units = {}
    for k in range(cat.object_count()):
        src = module.values[k]
        if not per_obj[k]:
            units[k] = AbMap.zero(src, values[k])
            continue
        stacked = None
        for orb in per_obj[k]:
            probe = module.action(h_obj, k, ((orb["rep"], 1),))
            block = express_through_inclusion(orb["incl"], probe).matrix
            stacked = block if stacked is None else stacked.vstack(block)
        units[k] = AbMap(src, values[k], stacked)
    return result, units


def dh_coinduction(module: CatModule, class_id: int) -> CatModule:
    """Coinduction of an orbit module off one isotropy class."""
    return _dh_with_unit(module, class_id)[0]


class TowerStage:
    """One step: the module, its coinduction product, unit, and cokernel."""

    def __init__(self, module, dm, unit, coker, proj, xi_value,
                 unit_injective, middle_exact):
        self.module = module
        self.dm = dm
        self.unit = unit
        self.coker = coker
        self.proj = proj
        self.xi = xi_value
        self.unit_injective = unit_injective
        self.middle_exact = middle_exact

    @property
    def exact(self):
        return self.unit_injective and self.middle_exact

    def summary(self):
        return {
            "xi": self.xi if self.xi != float("inf") else None,
            "values": {obj: list(v.invariant_factors)
                       for obj, v in sorted(self.module.values.items())},
            "exact": self.exact,
        }


class TowerReport:
    def __init__(self, stages, final):
        self.stages = stages
        self.final = final

    @property
    def exact(self):
        return all(s.exact for s in self.stages)

    @property
    def xis(self):
        return [s.xi for s in self.stages]

    def final_is_zero(self):
        return self.final.is_zero()

    def summary(self):
        return {
            "stages": [s.summary() for s in self.stages],
            "final_zero": self.final_is_zero(),
            "final_xi": xi(self.final) if not self.final_is_zero() else None,
            "exact": self.exact,
        }


def d_tower(module: CatModule, depth: int, rank_bound: int = 4096) -> TowerReport:
    """Iterate coinduction-product cokernels ``depth + 1`` times.

    Each stage splices 0 -> M -> DM -> CM -> 0 with DM the product of the
    single-class coinductions; exactness is checked objectwise.  The final
    cokernel is zero once depth reaches the subgroup length of the group.
    """
    cat = module.category
    current = module
    stages = []
    for _ in range(depth + 1):
        parts = []
        unit_blocks = []
        for class_id in cat.objects:
            dmod, units = _dh_with_unit(current, class_id)
            parts.append(dmod)
            unit_blocks.append(units)
        dm, _ = direct_sum_modules(cat, parts)
        for obj in range(cat.object_count()):
            if dm.values[obj].ambient_rank > rank_bound:
                raise ResourceError(
                    f"tower value exceeded rank bound {rank_bound}")
        components = {}
        for obj in range(cat.object_count()):
            stacked = unit_blocks[0][obj].matrix
            for units in unit_blocks[1:]:
                stacked = stacked.vstack(units[obj].matrix)
            components[obj] = AbMap(current.values[obj], dm.values[obj],
                                    stacked)
        unit = NatTrans(current, dm, components)
        injective = all(
            abelian_kernel(components[obj])[0].is_trivial()
            for obj in range(cat.object_count()))
        coker, proj = cokernel_module(unit)
        middle = all(
            lattices_equal(
                preimage_lattice(proj.components[obj]),
                lattice_sum(components[obj].matrix,
                            dm.values[obj].relations))
            for obj in range(cat.object_count()))
        stages.append(TowerStage(current, dm, unit, coker, proj,
                                 xi(current), injective, middle))
        current = coker
    return TowerReport(stages, current)
