"""Orbit categories and span (Mackey) categories of a finite group.

Objects in both flavors are conjugacy classes of family subgroups, one object
per class, always spoken of through the class's canonical representative
subgroup.  Hom sets are free abelian groups on finite bases:

* orbit flavor: a basis morphism class(H) -> class(K) is a coset x*K with
  x^-1 H x <= K, stored by its minimal coset representative;
* mackey flavor: a basis morphism is a basic span class(S) <- (L, twist g)
  -> class(K) with L <= S and g^-1 L g <= K, stored in the lexicographically
  minimal translate over S x K.

Composition of spans is by orbit decomposition of the fiber product of the
underlying transitive G-sets; every pair of composable basis elements lands
in an integer combination of basis elements, recorded in a sparse table.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MismatchedParent, ObjectMismatch
from .grp import Family, Group, SubgroupHandle


@dataclass(frozen=True)
class OrbitMorphism:
    """class(H) -> class(K) as the coset (coset_rep)*K_rep; 0-based element id."""
    source: int
    target: int
    coset_rep: int


@dataclass(frozen=True)
class Span:
    """Basic span class(S) <- middle -> class(K); middle is a subgroup id of
    the parent group contained in S_rep, twist an element id with
    twist^-1 * middle * twist <= K_rep."""
    source: int
    target: int
    middle: int
    twist: int


# -- integer combinations of basis morphisms --------------------------------


def combo_add(a, b):
    out = dict(a)
    for idx, c in b:
        out[idx] = out.get(idx, 0) + c
    return tuple(sorted((i, c) for i, c in out.items() if c))


def combo_scale(a, s):
    if s == 0:
        return ()
    return tuple((i, c * s) for i, c in a)


class FiniteAdditiveCategory:
    """A finite additive category presented by hom bases and a sparse
    composition table.

    ``objects`` lists subgroup class ids in canonical order.  Morphisms are
    integer combinations ``((basis_index, coeff), ...)`` inside a fixed hom
    pair.  ``compose_basis(a, b, c, i, j)`` is the combination representing
    basis morphism j (in hom(b, c)) after basis morphism i (in hom(a, b)).
    """

    def __init__(self, group: Group, family: Family, flavor: str):
        if family.parent is not group:
            raise MismatchedParent("family belongs to a different group")
        self.group = group
        self.family = family
        self.flavor = flavor
        self.objects = family.sorted_classes()
        self.obj_index = {c: i for i, c in enumerate(self.objects)}
        self.rep_sub = [group.class_rep(c) for c in self.objects]
        self.hom_basis = {}
        self.basis_index = {}
        self._compose_cache = {}
        self._span_canon_cache = {}
        self._build_homs()
        self.identity_index = [self._find_identity(i) for i in range(len(self.objects))]

    # -- construction --------------------------------------------------------

    def _build_homs(self):
        raise NotImplementedError

    def _find_identity(self, i):
        raise NotImplementedError

    # -- generic access ------------------------------------------------------

    def object_count(self):
        return len(self.objects)

    def hom(self, a, b):
        return self.hom_basis[(a, b)]

    def hom_rank(self, a, b):
        return len(self.hom_basis[(a, b)])

    def index_of(self, a, b, morphism):
        try:
            return self.basis_index[(a, b)][morphism]
        except KeyError:
            raise ObjectMismatch(f"not a basis morphism of hom({a},{b}): {morphism}") from None

    def identity_combo(self, a):
        return ((self.identity_index[a], 1),)

    def compose_basis(self, a, b, c, i, j):
        """Combination in hom(a, c) for basis j in hom(b, c) after basis i in hom(a, b)."""
        key = (a, b, c, i, j)
        hit = self._compose_cache.get(key)
        if hit is None:
            hit = self._compose_raw(a, b, c, i, j)
            self._compose_cache[key] = hit
        return hit

    def compose(self, a, b, c, combo_ab, combo_bc):
        """Linear extension of composition: (combo_bc) after (combo_ab)."""
        out = ()
        for i, ci in combo_ab:
            for j, cj in combo_bc:
                out = combo_add(out, combo_scale(self.compose_basis(a, b, c, i, j), ci * cj))
        return out

    def _compose_raw(self, a, b, c, i, j):
        raise NotImplementedError

    # -- validation ----------------------------------------------------------

    def check_identities(self):
        for a in range(self.object_count()):
            for b in range(self.object_count()):
                for i in range(self.hom_rank(a, b)):
                    left = self.compose(a, a, b, self.identity_combo(a), ((i, 1),))
                    right = self.compose(a, b, b, ((i, 1),), self.identity_combo(b))
                    if left != ((i, 1),) or right != ((i, 1),):
                        raise ObjectMismatch(
                            f"identity axiom fails at hom({a},{b}) basis {i}")

    def check_associativity(self):
        """Exhaustive (h.g).f == h.(g.f) over all composable basis triples."""
        n = self.object_count()
        for a in range(n):
            for b in range(n):
                if not self.hom_rank(a, b):
                    continue
                for c in range(n):
                    if not self.hom_rank(b, c):
                        continue
                    for d in range(n):
                        if not self.hom_rank(c, d):
                            continue
                        for i in range(self.hom_rank(a, b)):
                            fi = ((i, 1),)
                            for j in range(self.hom_rank(b, c)):
                                gf = self.compose_basis(a, b, c, i, j)
                                for k in range(self.hom_rank(c, d)):
                                    hk = ((k, 1),)
                                    lhs = self.compose(a, c, d, gf, hk)
                                    hg = self.compose_basis(b, c, d, j, k)
                                    rhs = self.compose(a, b, d, fi, hg)
                                    if lhs != rhs:
                                        raise ObjectMismatch(
                                            "associativity fails at "
                                            f"({a},{b},{c},{d}) basis ({i},{j},{k})")

    def dump(self):
        """JSON-friendly description of objects, hom bases and the table."""
        homs = {}
        for (a, b), basis in sorted(self.hom_basis.items()):
            homs[f"{a},{b}"] = [self.describe_morphism(m) for m in basis]
        table = {}
        n = self.object_count()
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for i in range(self.hom_rank(a, b)):
                        for j in range(self.hom_rank(b, c)):
                            combo = self.compose_basis(a, b, c, i, j)
                            table[f"{a},{b},{c}:{i},{j}"] = [list(t) for t in combo]
        return {
            "flavor": self.flavor,
            "objects": [
                {"class_id": c,
                 "subgroup_order": len(self.group.subgroups[self.rep_sub[i]])}
                for i, c in enumerate(self.objects)
            ],
            "hom_bases": homs,
            "compose_table": table,
        }

    def describe_morphism(self, m):
        raise NotImplementedError


class OrbitCategory(FiniteAdditiveCategory):
    def __init__(self, group, family):
        super().__init__(group, family, "orbit")

    def _build_homs(self):
        g = self.group
        subs = g.subgroups
        n = len(self.objects)
        for bi in range(n):
            k_id = self.rep_sub[bi]
            k_members = sorted(subs[k_id])
            for ai in range(n):
                h_id = self.rep_sub[ai]
                h_members = subs[h_id]
                reps = set()
                for x in range(g.order):
                    if all(g.conj(g.inv[x], h) in subs[k_id] for h in h_members):
                        reps.add(min(g.mul(x, k) for k in k_members))
                basis = [OrbitMorphism(ai, bi, r) for r in sorted(reps)]
                self.hom_basis[(ai, bi)] = basis
                self.basis_index[(ai, bi)] = {m: i for i, m in enumerate(basis)}

    def _find_identity(self, i):
        return self.index_of(i, i, OrbitMorphism(i, i, 0))

    def _compose_raw(self, a, b, c, i, j):
        g = self.group
        f = self.hom_basis[(a, b)][i]
        s = self.hom_basis[(b, c)][j]
        q_members = sorted(g.subgroups[self.rep_sub[c]])
        xy = g.mul(f.coset_rep, s.coset_rep)
        rep = min(g.mul(xy, q) for q in q_members)
        idx = self.index_of(a, c, OrbitMorphism(a, c, rep))
        return ((idx, 1),)

    def describe_morphism(self, m: OrbitMorphism):
        return {"source": m.source, "target": m.target,
                "coset": self.group.elements[m.coset_rep].cycle_string()}


class MackeyCategory(FiniteAdditiveCategory):
    def __init__(self, group, family):
        super().__init__(group, family, "mackey")

    def canonical_span(self, a, b, middle_id, twist):
        """Lexicographically minimal translate of (middle, twist) over S x K."""
        key = (a, b, middle_id, twist)
        hit = self._span_canon_cache.get(key)
        if hit is not None:
            return hit
        g = self.group
        subs = g.subgroups
        s_members = sorted(subs[self.rep_sub[a]])
        k_members = sorted(subs[self.rep_sub[b]])
        best = None
        for s in s_members:
            ls = g.conj_subgroup(s, middle_id)
            ls_key = tuple(sorted(subs[ls]))
            sg = g.mul(s, twist)
            for k in k_members:
                cand = (ls_key, g.mul(sg, k), ls)
                if best is None or cand[:2] < best[:2]:
                    best = cand
        span = Span(a, b, best[2], best[1])
        self._span_canon_cache[key] = span
        return span

    def _build_homs(self):
        g = self.group
        subs = g.subgroups
        n = len(self.objects)
        for ai in range(n):
            s_id = self.rep_sub[ai]
            s_members = subs[s_id]
            middles = [sid for sid, mem in enumerate(subs) if mem <= s_members]
            for bi in range(n):
                k_id = self.rep_sub[bi]
                k_members = subs[k_id]
                found = set()
                for mid in middles:
                    mid_members = subs[mid]
                    for x in range(g.order):
                        if all(g.conj(g.inv[x], l) in k_members for l in mid_members):
                            found.add(self.canonical_span(ai, bi, mid, x))
                basis = sorted(
                    found,
                    key=lambda sp: (-len(subs[sp.middle]),
                                    tuple(sorted(subs[sp.middle])), sp.twist))
                self.hom_basis[(ai, bi)] = basis
                self.basis_index[(ai, bi)] = {m: i for i, m in enumerate(basis)}

    def _find_identity(self, i):
        return self.index_of(i, i, Span(i, i, self.rep_sub[i], 0))

    def _compose_raw(self, a, b, c, i, j):
        g = self.group
        subs = g.subgroups
        f = self.hom_basis[(a, b)][i]
        s = self.hom_basis[(b, c)][j]
        k_members = sorted(subs[self.rep_sub[b]])
        l_conj = g.conj_subgroup(g.inv[f.twist], f.middle)  # inside K_rep
        p_members = subs[s.middle]
        l_members = subs[l_conj]
        out = ()
        seen = set()
        for k in k_members:
            if k in seen:
                continue
            coset = {g.mul(g.mul(l, k), p) for l in l_members for p in p_members}
            seen |= coset
            gk = g.mul(f.twist, k)
            mid_members = subs[f.middle] & frozenset(
                g.conj(gk, p) for p in p_members)
            mid_id = g.subgroup_id(mid_members)
            twist = g.mul(gk, s.twist)
            span = self.canonical_span(a, c, mid_id, twist)
            idx = self.index_of(a, c, span)
            out = combo_add(out, ((idx, 1),))
        return out

    def describe_morphism(self, m: Span):
        g = self.group
        return {
            "source": m.source,
            "target": m.target,
            "middle": [g.elements[x].cycle_string() for x in sorted(g.subgroups[m.middle])],
            "twist": g.elements[m.twist].cycle_string(),
        }


_category_cache = {}


def orbit_category(group: Group, family: Family) -> OrbitCategory:
    """The orbit category of the family: objects class(H), morphisms cosets.

    Instances are cached per (group, family), so repeated calls hand back
    the identical category and modules built over them stay compatible.
    """
    key = (id(group), "orbit", frozenset(family.class_ids))
    if key not in _category_cache:
        _category_cache[key] = OrbitCategory(group, family)
    return _category_cache[key]


def mackey_category(group: Group, family: Family) -> MackeyCategory:
    """The span (Burnside/Mackey) category of the family.  Cached like
    orbit_category."""
    key = (id(group), "mackey", frozenset(family.class_ids))
    if key not in _category_cache:
        _category_cache[key] = MackeyCategory(group, family)
    return _category_cache[key]


def compose_spans(cat: MackeyCategory, first: Span, then: Span):
    """Public span composition: combination for ``then`` after ``first``."""
    if first.target != then.source:
        raise ObjectMismatch("spans are not composable")
    a, b, c = first.source, first.target, then.target
    i = cat.index_of(a, b, cat.canonical_span(a, b, first.middle, first.twist))
    j = cat.index_of(b, c, cat.canonical_span(b, c, then.middle, then.twist))
    return cat.compose_basis(a, b, c, i, j)


@dataclass(frozen=True)
class RICFactor:
    """One generator map: kind 'R' or 'I' with (sub, sup) subgroup ids, or
    kind 'c' with the conjugating element id and the source subgroup id."""
    kind: str
    arg: int        # element id for 'c', subgroup id (the smaller) otherwise
    context: int    # subgroup id: the larger subgroup, or conjugation source


def ric_decompose(cat: MackeyCategory, span: Span):
    """Express a basic span as induction after conjugation after restriction.

    Returns factors as applied to a value at the span's target, i.e. in the
    order (R, c, I): first restrict from K_rep to g^-1 L g, then transport
    along conjugation by g, then induce from L up to S_rep.  Literal identity
    factors are dropped; the identity span yields an empty word.
    """
    g = cat.group
    s_id = cat.rep_sub[span.source]
    k_id = cat.rep_sub[span.target]
    l_id = span.middle
    twist = span.twist
    l_conj = g.conj_subgroup(g.inv[twist], l_id)
    word = []
    if l_conj != k_id:
        word.append(RICFactor("R", l_conj, k_id))
    if twist != 0:
        word.append(RICFactor("c", twist, l_conj))
    if l_id != s_id:
        word.append(RICFactor("I", l_id, s_id))
    return tuple(word)


class CatFunctor:
    """Additive functor between finite additive categories, stored as data.

    ``obj_map[i]`` is the target object index for source object i;
    ``mor_map[(a, b, i)]`` the image combination in hom(F(a), F(b)).
    """

    def __init__(self, source: FiniteAdditiveCategory,
                 target: FiniteAdditiveCategory, obj_map, mor_map):
        self.source = source
        self.target = target
        self.obj_map = list(obj_map)
        self.mor_map = dict(mor_map)

    def apply(self, a, b, combo):
        out = ()
        for i, c in combo:
            out = combo_add(out, combo_scale(self.mor_map[(a, b, i)], c))
        return out

    def check_functor(self):
        src, tgt = self.source, self.target
        n = src.object_count()
        for a in range(n):
            image_id = self.apply(a, a, src.identity_combo(a))
            if image_id != tgt.identity_combo(self.obj_map[a]):
                raise ObjectMismatch(f"functor does not preserve identity at {a}")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for i in range(src.hom_rank(a, b)):
                        for j in range(src.hom_rank(b, c)):
                            lhs = self.apply(a, c, src.compose_basis(a, b, c, i, j))
                            rhs = tgt.compose(
                                self.obj_map[a], self.obj_map[b], self.obj_map[c],
                                self.apply(a, b, ((i, 1),)),
                                self.apply(b, c, ((j, 1),)))
                            if lhs != rhs:
                                raise ObjectMismatch(
                                    f"functor breaks composition at ({a},{b},{c}):({i},{j})")
        return True


def orbit_to_mackey(orb: OrbitCategory, mack: MackeyCategory) -> CatFunctor:
    """The canonical functor orbit -> mackey: a coset map becomes the span
    with full middle and the same twist."""
    if orb.group is not mack.group or orb.family != mack.family:
        raise MismatchedParent("categories must share group and family")
    obj_map = list(range(orb.object_count()))
    mor_map = {}
    for (a, b), basis in orb.hom_basis.items():
        for i, m in enumerate(basis):
            span = mack.canonical_span(a, b, orb.rep_sub[a], m.coset_rep)
            mor_map[(a, b, i)] = ((mack.index_of(a, b, span), 1),)
    return CatFunctor(orb, mack, obj_map, mor_map)


def _canonical_conjugator(group: Group, from_sub: int, to_sub: int) -> int:
    """Minimal element id u with u * from * u^-1 == to."""
    for u in range(group.order):
        if group.conj_subgroup(u, from_sub) == to_sub:
            return u
    raise ObjectMismatch("subgroups are not conjugate")


class SubgroupEmbedding:
    """A subgroup N <= G materialized as its own Group, with translation data.

    ``subgroup`` is N as a standalone Group (same permutation degree as G),
    ``to_parent[i]`` the G element id of N element i, and the induced family
    on N consists of the N-classes of family subgroups of G lying in N.
    """

    def __init__(self, parent: Group, handle: SubgroupHandle, family: Family):
        if handle.parent is not parent or family.parent is not parent:
            raise MismatchedParent("embedding data belongs to different groups")
        self.parent = parent
        self.handle = handle
        self.subgroup = Group.from_elements(
            [parent.elements[i] for i in handle.members])
        self.to_parent = [parent.index(p) for p in self.subgroup.elements]
        self.parent_family = family
        sub_classes = set()
        for sid, members in enumerate(self.subgroup.subgroups):
            parent_members = frozenset(self.to_parent[i] for i in members)
            parent_sid = parent.subgroup_id(parent_members)
            if family.contains_subgroup(parent_sid):
                sub_classes.add(self.subgroup.class_of_subgroup(sid))
        self.family = Family(self.subgroup, sub_classes)

    def parent_subgroup_id(self, sub_id: int) -> int:
        members = frozenset(self.to_parent[i] for i in self.subgroup.subgroups[sub_id])
        return self.parent.subgroup_id(members)


def inclusion_functor(emb: SubgroupEmbedding,
                      small: FiniteAdditiveCategory,
                      big: FiniteAdditiveCategory) -> CatFunctor:
    """Induction on orbits: the functor from a category over N <= G to the
    same-flavor category over G sending N/L to G/L.

    Each object of the small category is translated through a fixed
    conjugator aligning its representative subgroup with the representative
    of its class in G; morphisms are conjugated accordingly, so functoriality
    holds on the nose.
    """
    if small.flavor != big.flavor:
        raise MismatchedParent("inclusion functor needs matching flavors")
    parent = emb.parent
    obj_map = []
    conjugators = []
    for i in range(small.object_count()):
        rep_parent = emb.parent_subgroup_id(small.rep_sub[i])
        cls = parent.class_of_subgroup(rep_parent)
        big_obj = big.obj_index[cls]
        obj_map.append(big_obj)
        conjugators.append(
            _canonical_conjugator(parent, rep_parent, big.rep_sub[big_obj]))
    mor_map = {}
    for (a, b), basis in small.hom_basis.items():
        ua, ub = conjugators[a], conjugators[b]
        for i, m in enumerate(basis):
            if small.flavor == "orbit":
                x = emb.to_parent[m.coset_rep]
                moved = parent.mul(parent.mul(ua, x), parent.inv[ub])
                k_members = sorted(parent.subgroups[big.rep_sub[obj_map[b]]])
                rep = min(parent.mul(moved, k) for k in k_members)
                target_m = OrbitMorphism(obj_map[a], obj_map[b], rep)
                mor_map[(a, b, i)] = ((big.index_of(obj_map[a], obj_map[b], target_m), 1),)
            else:
                mid_parent = emb.parent_subgroup_id(m.middle)
                mid_moved = parent.conj_subgroup(ua, mid_parent)
                twist = parent.mul(parent.mul(ua, emb.to_parent[m.twist]),
                                   parent.inv[ub])
                span = big.canonical_span(obj_map[a], obj_map[b], mid_moved, twist)
                mor_map[(a, b, i)] = ((big.index_of(obj_map[a], obj_map[b], span), 1),)
    return CatFunctor(small, big, obj_map, mor_map)


def conjugation_functor(cat: FiniteAdditiveCategory, g: int) -> CatFunctor:
    """The self-equivalence induced by conjugation with a group element.

    Objects are fixed (conjugation preserves classes); a morphism is moved by
    conjugating its data and re-expressing it against the representatives.
    """
    group = cat.group
    conjugators = []
    for i in range(cat.object_count()):
        moved = group.conj_subgroup(g, cat.rep_sub[i])
        conjugators.append(_canonical_conjugator(group, moved, cat.rep_sub[i]))
    mor_map = {}
    for (a, b), basis in cat.hom_basis.items():
        wa, wb = conjugators[a], conjugators[b]
        for i, m in enumerate(basis):
            if cat.flavor == "orbit":
                x = group.mul(group.mul(g, m.coset_rep), group.inv[g])
                moved = group.mul(group.mul(wa, x), group.inv[wb])
                k_members = sorted(group.subgroups[cat.rep_sub[b]])
                rep = min(group.mul(moved, k) for k in k_members)
                mor_map[(a, b, i)] = ((cat.index_of(a, b, OrbitMorphism(a, b, rep)), 1),)
            else:
                mid = group.conj_subgroup(group.mul(wa, g), m.middle)
                twist = group.mul(
                    group.mul(group.mul(wa, g), m.twist),
                    group.inv[group.mul(wb, g)])
                span = cat.canonical_span(a, b, mid, twist)
                mor_map[(a, b, i)] = ((cat.index_of(a, b, span), 1),)
    return CatFunctor(cat, cat, list(range(cat.object_count())), mor_map)


def quotient_functor(quotient_data,
                     gamma_cat: FiniteAdditiveCategory,
                     g_cat: FiniteAdditiveCategory) -> CatFunctor:
    """Functor along a surjection p: Gamma -> G with finite kernel.

    ``quotient_data`` is a grp.QuotientData for Gamma/(kernel); the Gamma-side
    category's family must be the p-pullback of the G-side family, so p(S)
    runs over G-family subgroups.  Orbit flavor only.
    """
    if gamma_cat.flavor != "orbit" or g_cat.flavor != "orbit":
        raise MismatchedParent("quotient functor implemented for orbit flavor")
    gamma = gamma_cat.group
    g_grp = g_cat.group
    proj = quotient_data.project
    obj_map = []
    conjugators = []
    for i in range(gamma_cat.object_count()):
        members = frozenset(proj[x] for x in gamma.subgroups[gamma_cat.rep_sub[i]])
        sid = g_grp.subgroup_id(members)
        cls = g_grp.class_of_subgroup(sid)
        obj = g_cat.obj_index[cls]
        obj_map.append(obj)
        conjugators.append(_canonical_conjugator(g_grp, sid, g_cat.rep_sub[obj]))
    mor_map = {}
    for (a, b), basis in gamma_cat.hom_basis.items():
        ua, ub = conjugators[a], conjugators[b]
        for i, m in enumerate(basis):
            x = proj[m.coset_rep]
            moved = g_grp.mul(g_grp.mul(ua, x), g_grp.inv[ub])
            k_members = sorted(g_grp.subgroups[g_cat.rep_sub[obj_map[b]]])
            rep = min(g_grp.mul(moved, k) for k in k_members)
            mor = OrbitMorphism(obj_map[a], obj_map[b], rep)
            mor_map[(a, b, i)] = ((g_cat.index_of(obj_map[a], obj_map[b], mor), 1),)
    return CatFunctor(gamma_cat, g_cat, obj_map, mor_map)


def conjugator_to_rep(group: Group, sub_id: int, rep_id: int) -> int:
    """Minimal element id u with u * sub * u^-1 equal to the representative."""
    return _canonical_conjugator(group, sub_id, rep_id)


def express_span(cat: MackeyCategory, src_sub: int, mid_sub: int, twist: int,
                 tgt_sub: int):
    """Translate a span on arbitrary subgroups into representative coordinates.

    The span (src <- mid, twist -> tgt) has mid inside src and
    twist^-1 * mid * twist inside tgt.  Both endpoints are carried through
    the fixed conjugators aligning them with their class representatives, so
    repeated calls compose consistently.  Returns (source_obj, target_obj,
    Span) with the span already in canonical form.
    """
    g = cat.group
    ai = cat.obj_index[g.class_of_subgroup(src_sub)]
    bi = cat.obj_index[g.class_of_subgroup(tgt_sub)]
    ua = _canonical_conjugator(g, src_sub, cat.rep_sub[ai])
    ub = _canonical_conjugator(g, tgt_sub, cat.rep_sub[bi])
    mid = g.conj_subgroup(ua, mid_sub)
    tw = g.mul(g.mul(ua, twist), g.inv[ub])
    return ai, bi, cat.canonical_span(ai, bi, mid, tw)
