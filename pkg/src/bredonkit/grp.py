"""Finite permutation groups, subgroup lattices, and families of subgroups.

Permutations act on 0-based points internally; cycle notation in input and
output is 1-based.  Element order inside a group is lexicographic on image
tuples, so the identity is always element 0 and every enumeration downstream
(cosets, subgroups, categories) is deterministic.
"""

from __future__ import annotations

import os

from .errors import (
    ExplosionError,
    FamilyError,
    MismatchedParent,
    ParseError,
    Unsupported,
)

DEFAULT_ELEMENT_BOUND = 20000


def element_bound(override=None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get("BREDONKIT_ELEMENT_BOUND")
    return int(env) if env else DEFAULT_ELEMENT_BOUND


class Perm:
    """Permutation of {0, ..., degree-1} stored as a tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(len(images))):
            raise ParseError(f"not a permutation of 0..{len(images) - 1}: {images}")
        self.images = images

    @staticmethod
    def identity(degree: int) -> "Perm":
        return Perm(range(degree))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Perm") -> "Perm":
        # (p * q)(x) = p(q(x)): apply q first.
        if self.degree != other.degree:
            raise MismatchedParent("permutation degrees differ")
        return Perm(tuple(self.images[x] for x in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, x in enumerate(self.images):
            inv[x] = i
        return Perm(inv)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def extended(self, degree: int) -> "Perm":
        """The same permutation acting on a larger point set."""
        if degree < self.degree:
            raise ParseError("cannot shrink a permutation")
        return Perm(self.images + tuple(range(self.degree, degree)))

    def cycles(self):
        """Nontrivial cycles, 0-based, each rotated to start at its minimum."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def cycle_string(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cycs)

    def __eq__(self, other):
        return isinstance(other, Perm) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Perm({self.cycle_string()})"


def parse_cycles(text: str, degree: int = None) -> Perm:
    """Parse one permutation in 1-based cycle notation, e.g. '(1 2)(3 4 5)'.

    'e', '()' and '' denote the identity.  Points may be separated by spaces
    or commas inside a cycle.
    """
    text = text.strip()
    if text in ("e", "()", "", "id"):
        return Perm.identity(degree or 1)
    if text.count("(") != text.count(")"):
        raise ParseError(f"unbalanced parentheses in {text!r}")
    cycles = []
    maxpt = degree or 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch != "(":
            raise ParseError(f"unexpected character {ch!r} in {text!r}")
        j = text.index(")", i)
        body = text[i + 1:j].replace(",", " ").split()
        try:
            pts = [int(tok) for tok in body]
        except ValueError:
            raise ParseError(f"non-integer point in cycle {text[i:j + 1]!r}") from None
        if any(p < 1 for p in pts):
            raise ParseError("cycle points are 1-based and must be positive")
        if len(set(pts)) != len(pts):
            raise ParseError(f"repeated point in cycle {text[i:j + 1]!r}")
        if pts:
            cycles.append([p - 1 for p in pts])
            maxpt = max(maxpt, max(pts))
        i = j + 1
    images = list(range(maxpt if degree is None else max(degree, maxpt)))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a] = b
    return Perm(images)


def parse_generator_list(text: str) -> list:
    """Split a generator string like '(1 2), (1 2 3)' into Perm values.

    Permutations are separated by commas or semicolons at paren depth zero.
    """
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced parentheses in {text!r}")
        if ch in ",;" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    parts = [p for p in (s.strip() for s in parts) if p]
    if not parts:
        raise ParseError("no generators given")
    perms = [parse_cycles(p) for p in parts]
    degree = max(p.degree for p in perms)
    return [p.extended(degree) for p in perms]


class Group:
    """A finite permutation group with materialized element list.

    Elements are sorted lexicographically by image tuple; all tables speak in
    element indices.  Construction enumerates by breadth-first closure of the
    generators and raises ExplosionError past the element bound.
    """

    def __init__(self, generators, bound=None, name=None):
        generators = list(generators)
        if not generators:
            raise ParseError("a group needs at least one generator")
        degree = max(g.degree for g in generators)
        generators = [g.extended(degree) for g in generators]
        self.kind = "finite"
        self.degree = degree
        self.name = name
        limit = element_bound(bound)
        elems = {Perm.identity(degree)}
        frontier = list(elems)
        while frontier:
            nxt = []
            for p in frontier:
                for g in generators:
                    q = g * p
                    if q not in elems:
                        elems.add(q)
                        nxt.append(q)
                        if len(elems) > limit:
                            raise ExplosionError(
                                f"group enumeration exceeded bound {limit}")
            frontier = nxt
        self.elements = sorted(elems)
        self.order = len(self.elements)
        self.element_index = {p.images: i for i, p in enumerate(self.elements)}
        self.generators = [g for g in generators if not g.is_identity()] or \
            [Perm.identity(degree)]
        self.generator_ids = [self.index(g) for g in self.generators]
        self._mult = None
        self._inv = None
        self._subgroups = None
        self._classes = None
        self._conj_cache = {}
        self._lengths = None

    @staticmethod
    def from_elements(perms, name=None) -> "Group":
        """Group from a closed element list, with a small generating set."""
        perms = sorted(set(perms))
        identity = Perm.identity(perms[0].degree)
        target = len(perms)
        gens = []
        have = {identity}
        for p in perms:
            if p in have:
                continue
            gens.append(p)
            closure = {identity}
            frontier = [identity]
            while frontier:
                nxt = []
                for q in frontier:
                    for g in gens:
                        r = g * q
                        if r not in closure:
                            closure.add(r)
                            nxt.append(r)
                frontier = nxt
            have = closure
            if len(have) == target:
                break
        grp = Group(gens or [identity], name=name)
        if grp.order != target:
            raise MismatchedParent("element list was not closed under products")
        return grp

    # -- element arithmetic in index space ---------------------------------

    def index(self, perm: Perm) -> int:
        try:
            return self.element_index[perm.images]
        except KeyError:
            raise MismatchedParent("permutation is not an element of this group") from None

    @property
    def mult(self):
        if self._mult is None:
            idx = self.element_index
            self._mult = [
                [idx[(p * q).images] for q in self.elements] for p in self.elements
            ]
        return self._mult

    @property
    def inv(self):
        if self._inv is None:
            self._inv = [self.index(p.inverse()) for p in self.elements]
        return self._inv

    def mul(self, i: int, j: int) -> int:
        """Index of elements[i] * elements[j] (apply j first)."""
        return self.mult[i][j]

    def conj(self, g: int, h: int) -> int:
        """Index of g h g^-1."""
        m = self.mult
        return m[m[g][h]][self.inv[g]]

    # -- subgroup lattice ---------------------------------------------------

    def _generate_subgroup(self, seed_ids):
        """Closure of a set of element ids as a frozenset of ids."""
        m = self.mult
        members = {0}
        frontier = [0]
        seeds = list(seed_ids)
        while frontier:
            nxt = []
            for x in frontier:
                for s in seeds:
                    y = m[s][x]
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(members)

    @property
    def subgroups(self):
        """All subgroups as frozensets of element ids, sorted canonically."""
        if self._subgroups is None:
            cyclics = {self._generate_subgroup([g]) for g in range(self.order)}
            known = set(cyclics)
            frontier = set(cyclics)
            while frontier:
                fresh = set()
                for h in frontier:
                    for c in cyclics:
                        if c <= h:
                            continue
                        joined = self._generate_subgroup(h | c)
                        if joined not in known:
                            known.add(joined)
                            fresh.add(joined)
                frontier = fresh
            self._subgroups = sorted(known, key=lambda s: (len(s), sorted(s)))
            self._sub_index = {s: i for i, s in enumerate(self._subgroups)}
        return self._subgroups

    def subgroup_id(self, members) -> int:
        subs = self.subgroups
        key = frozenset(members)
        try:
            return self._sub_index[key]
        except KeyError:
            raise MismatchedParent("member set is not a subgroup of this group") from None

    def conj_subgroup(self, g: int, sub_id: int) -> int:
        """id of the conjugate g H g^-1."""
        key = (g, sub_id)
        hit = self._conj_cache.get(key)
        if hit is None:
            members = frozenset(self.conj(g, h) for h in self.subgroups[sub_id])
            hit = self._sub_index[members]
            self._conj_cache[key] = hit
        return hit

    @property
    def subgroup_class_data(self):
        """(class_of, class_reps): conjugacy classes of subgroups.

        Classes are sorted by (order of rep, member tuple of rep), so class 0
        is always the trivial subgroup and the last class is G itself.
        """
        if self._classes is None:
            subs = self.subgroups
            class_of = [-1] * len(subs)
            reps = []
            for i in range(len(subs)):
                if class_of[i] >= 0:
                    continue
                orbit = {i}
                for g in range(self.order):
                    orbit.add(self.conj_subgroup(g, i))
                rep = min(orbit, key=lambda s: (len(subs[s]), sorted(subs[s])))
                for j in orbit:
                    class_of[j] = len(reps)
                reps.append((rep, sorted(orbit)))
            # Re-sort classes canonically by their representative.
            order = sorted(range(len(reps)),
                           key=lambda c: (len(subs[reps[c][0]]), sorted(subs[reps[c][0]])))
            remap = {old: new for new, old in enumerate(order)}
            class_of = [remap[c] for c in class_of]
            reps = [reps[old] for old in order]
            self._classes = (class_of, reps)
        return self._classes

    def class_of_subgroup(self, sub_id: int) -> int:
        return self.subgroup_class_data[0][sub_id]

    def class_rep(self, class_id: int) -> int:
        return self.subgroup_class_data[1][class_id][0]

    def num_subgroup_classes(self) -> int:
        return len(self.subgroup_class_data[1])

    def subgroup_handle(self, members) -> "SubgroupHandle":
        ids = []
        for x in members:
            ids.append(self.index(x) if isinstance(x, Perm) else int(x))
        return SubgroupHandle(self, self.subgroup_id(ids))

    def full_handle(self) -> "SubgroupHandle":
        return SubgroupHandle(self, self.subgroup_id(range(self.order)))

    def trivial_handle(self) -> "SubgroupHandle":
        return SubgroupHandle(self, self.subgroup_id([0]))

    @property
    def subgroup_lengths(self):
        """l(H) for every subgroup id: longest strictly increasing chain below H."""
        if self._lengths is None:
            subs = self.subgroups
            lengths = [0] * len(subs)
            for i, h in enumerate(subs):  # sorted by size, so DP is valid
                best = 0
                for j in range(i):
                    if len(subs[j]) < len(h) and subs[j] < h:
                        best = max(best, lengths[j] + 1)
                lengths[i] = best
            self._lengths = lengths
        return self._lengths

    def to_json(self):
        return {
            "degree": self.degree,
            "generators": [g.cycle_string() for g in self.generators],
            "order": self.order,
        }

    def __repr__(self):
        label = self.name or f"degree {self.degree}"
        return f"Group({label}, order {self.order})"


class EncodedGroup:
    """A group known only by name and declared data; no element enumeration.

    Used for infinite groups carried by encoded classifying complexes.  Any
    operation that would enumerate elements raises Unsupported.
    """

    def __init__(self, name: str, generator_names):
        self.kind = "encoded"
        self.name = name
        self.generator_names = list(generator_names)

    def _refuse(self, what):
        raise Unsupported(
            f"{what} requires element enumeration, unavailable for encoded group {self.name!r}")

    @property
    def elements(self):
        self._refuse("element listing")

    @property
    def subgroups(self):
        self._refuse("subgroup enumeration")

    @property
    def order(self):
        self._refuse("order")

    def to_json(self):
        return {"kind": "encoded", "name": self.name,
                "generators": list(self.generator_names)}

    def __repr__(self):
        return f"EncodedGroup({self.name})"


class SubgroupHandle:
    """A subgroup of a materialized parent group.

    ``members`` is the sorted tuple of element indices; ``canonical_id`` is
    the index of its conjugacy class in the parent's canonical class order.
    """

    __slots__ = ("parent", "sub_id", "members")

    def __init__(self, parent: Group, sub_id: int):
        self.parent = parent
        self.sub_id = sub_id
        self.members = tuple(sorted(parent.subgroups[sub_id]))

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index_in_parent(self) -> int:
        return self.parent.order // self.order

    @property
    def canonical_id(self) -> int:
        return self.parent.class_of_subgroup(self.sub_id)

    def contains(self, element_id: int) -> bool:
        return element_id in self.parent.subgroups[self.sub_id]

    def conjugate(self, g: int) -> "SubgroupHandle":
        return SubgroupHandle(self.parent, self.parent.conj_subgroup(g, self.sub_id))

    def is_subgroup_of(self, other: "SubgroupHandle") -> bool:
        self._check(other)
        return self.parent.subgroups[self.sub_id] <= other.parent.subgroups[other.sub_id]

    def is_normal_in(self, other: "SubgroupHandle") -> bool:
        self._check(other)
        mine = self.parent.subgroups[self.sub_id]
        return all(frozenset(self.parent.conj(g, h) for h in mine) == mine
                   for g in other.members)

    def _check(self, other):
        if self.parent is not other.parent:
            raise MismatchedParent("subgroups live in different parent groups")

    def perms(self):
        return [self.parent.elements[i] for i in self.members]

    def generating_ids(self):
        """A small deterministic generating set (element ids)."""
        parent = self.parent
        target = set(self.members)
        gens = []
        closure = {0}
        for x in self.members:
            if x in closure:
                continue
            gens.append(x)
            closure = set(parent._generate_subgroup(gens))
            if closure == target:
                break
        return gens or [0]

    def to_json(self):
        return {
            "members": [self.parent.elements[i].cycle_string() for i in self.members],
            "order": self.order,
            "canonical_id": self.canonical_id,
        }

    def __eq__(self, other):
        return isinstance(other, SubgroupHandle) and \
            self.parent is other.parent and self.sub_id == other.sub_id

    def __hash__(self):
        return hash((id(self.parent), self.sub_id))

    def __repr__(self):
        return f"SubgroupHandle(order {self.order}, class {self.canonical_id})"


class Family:
    """A set of subgroup conjugacy classes closed under subgroups.

    Closure under conjugation is automatic (classes); closure under passing
    to subgroups is checked at construction and violations raise FamilyError.
    """

    def __init__(self, parent: Group, class_ids):
        self.parent = parent
        self.class_ids = frozenset(int(c) for c in class_ids)
        if not self.class_ids:
            raise FamilyError("a family must contain at least the trivial class")
        n = parent.num_subgroup_classes()
        for c in self.class_ids:
            if not 0 <= c < n:
                raise FamilyError(f"no subgroup class {c}")
            rep = parent.class_rep(c)
            rep_members = parent.subgroups[rep]
            for sid, members in enumerate(parent.subgroups):
                if members <= rep_members and \
                        parent.class_of_subgroup(sid) not in self.class_ids:
                    raise FamilyError(
                        "family not closed under subgroups: class "
                        f"{parent.class_of_subgroup(sid)} missing under class {c}")

    @staticmethod
    def all(parent: Group) -> "Family":
        return Family(parent, range(parent.num_subgroup_classes()))

    @staticmethod
    def trivial(parent: Group) -> "Family":
        return Family(parent, [parent.class_of_subgroup(parent.subgroup_id([0]))])

    @staticmethod
    def generated_by(parent: Group, handles) -> "Family":
        """Smallest family containing the given subgroups."""
        wanted = set()
        for h in handles:
            members = parent.subgroups[h.sub_id]
            for sid, sub in enumerate(parent.subgroups):
                if sub <= members:
                    wanted.add(parent.class_of_subgroup(sid))
        return Family(parent, wanted)

    def contains_class(self, class_id: int) -> bool:
        return class_id in self.class_ids

    def contains_subgroup(self, sub_id: int) -> bool:
        return self.parent.class_of_subgroup(sub_id) in self.class_ids

    def sorted_classes(self):
        return sorted(self.class_ids)

    def member_subgroup_ids(self):
        return [sid for sid in range(len(self.parent.subgroups))
                if self.contains_subgroup(sid)]

    def is_all(self) -> bool:
        return len(self.class_ids) == self.parent.num_subgroup_classes()

    def __eq__(self, other):
        return isinstance(other, Family) and self.parent is other.parent and \
            self.class_ids == other.class_ids

    def __hash__(self):
        return hash((id(self.parent), self.class_ids))

    def __repr__(self):
        return f"Family(classes {sorted(self.class_ids)})"


# -- public operations ------------------------------------------------------


def group_from_generators(gens, bound=None, name=None) -> Group:
    """Build a group from 1-based cycle notation or Perm values.

    >>> group_from_generators("(1 2), (1 2 3)").order
    6
    """
    if isinstance(gens, str):
        gens = parse_generator_list(gens)
    else:
        gens = [parse_cycles(g) if isinstance(g, str) else g for g in gens]
        degree = max(g.degree for g in gens)
        gens = [g.extended(degree) for g in gens]
    return Group(gens, bound=bound, name=name)


def subgroup_classes(group: Group):
    """One SubgroupHandle per conjugacy class, with the class size.

    Returns a list of (handle, class_size) in canonical class order.
    """
    _, reps = group.subgroup_class_data
    return [(SubgroupHandle(group, rep), len(orbit)) for rep, orbit in reps]


def double_cosets(group: Group, k: SubgroupHandle, h: SubgroupHandle):
    """Decompose G into K\\G/H double cosets.

    Returns a list of (rep_element_id, size), reps minimal in element order,
    sorted by rep.  The sizes always sum to |G|.
    """
    if k.parent is not group or h.parent is not group:
        raise MismatchedParent("double cosets need subgroups of the same group")
    m = group.mult
    seen = [False] * group.order
    out = []
    for x in range(group.order):
        if seen[x]:
            continue
        members = {m[m[a][x]][b] for a in k.members for b in h.members}
        for y in members:
            seen[y] = True
        out.append((x, len(members)))
    return out


def normalizer(group: Group, h: SubgroupHandle) -> SubgroupHandle:
    """N_G(H)."""
    ids = [g for g in range(group.order)
           if group.conj_subgroup(g, h.sub_id) == h.sub_id]
    return SubgroupHandle(group, group.subgroup_id(ids))


class QuotientData:
    """A quotient group ambient/normal realized on cosets.

    ``group`` is the quotient as a permutation group on the left cosets of
    the normal subgroup, ``coset_reps`` picks the minimal element id in each
    coset, and ``project`` sends an ambient element id to its image's index
    in ``group``.
    """

    def __init__(self, parent: Group, normal: SubgroupHandle, ambient: SubgroupHandle):
        if not normal.is_subgroup_of(ambient):
            raise MismatchedParent("normal subgroup must lie inside the ambient subgroup")
        m = parent.mult
        norm_members = list(normal.members)
        coset_of = {}
        reps = []
        for x in ambient.members:
            if x in coset_of:
                continue
            coset = sorted(m[x][n] for n in norm_members)
            for y in coset:
                coset_of[y] = len(reps)
            reps.append(coset[0])
        n_cosets = len(reps)
        perms = {}
        for x in ambient.members:
            images = tuple(coset_of[m[x][reps[c]]] for c in range(n_cosets))
            perms.setdefault(images, x)
        self.group = Group.from_elements([Perm(p) for p in perms])
        self.coset_reps = reps
        self._coset_of = coset_of
        self._parent = parent
        self._ambient = ambient
        project = {}
        for x in ambient.members:
            images = tuple(coset_of[m[x][reps[c]]] for c in range(n_cosets))
            project[x] = self.group.index(Perm(images))
        self.project = project

    def section(self, w_element: int) -> int:
        """An ambient element id mapping onto the given quotient element."""
        for x, w in self.project.items():
            if w == w_element:
                return x
        raise MismatchedParent("quotient element out of range")


def weyl(group: Group, h: SubgroupHandle) -> QuotientData:
    """W_G(H) = N_G(H)/H as a permutation group on cosets, with projection data."""
    n = normalizer(group, h)
    return QuotientData(group, h, n)


def length(h: SubgroupHandle) -> int:
    """l(H): the longest chain of strict subgroups below H."""
    return h.parent.subgroup_lengths[h.sub_id]


def group_length(group: Group) -> int:
    """l(G) for a finite group: length of its full subgroup handle."""
    return length(group.full_handle())
