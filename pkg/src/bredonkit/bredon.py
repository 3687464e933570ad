"""Equivariant cohomology over orbit categories, with desk-scale reports.

For a finite group and a family of subgroups the cohomology of the constant
module is computed from an automatically built free resolution; the
resolution is cached per orbit category and extended on demand.  Infinite
groups enter through ``EncodedComplex``: a finite-length cell structure with
declared isotropy classes, boundary words and composition facts, against
which table coefficients are paired.

Coefficients carry a class tag (``fix``, ``comack``, ``mack``, ``general``)
recording how much structure backs them; reports use the tag to attribute
witnessed lower bounds to the right notion of cohomological dimension.
"""

from __future__ import annotations

import threading

from .cats import (
    OrbitMorphism,
    SubgroupEmbedding,
    inclusion_functor,
    mackey_category,
    orbit_category,
    quotient_functor,
)
from .errors import (
    AxiomViolation,
    DegreeOutOfRange,
    IncompleteCoefficient,
    MismatchedParent,
    NotCohomological,
    ObjectMismatch,
    ParseError,
)
from .fmod import (
    CatModule,
    cohomology,
    coinduce_along,
    constant_module,
    free_module,
    free_resolution,
    restrict_along,
)
from .grp import EncodedGroup, Family, Group, SubgroupHandle, group_length
from .mackey import (
    GModule,
    MackeyFunctor,
    coinvariance_functor,
    fixed_point_functor,
    gmodule_coinduce,
    mackey_coinduce,
    quotient_data,
)
from .zmod import (
    AbMap,
    FgAbelian,
    IntMatrix,
    lattice_quotient,
    lattice_sum,
    preimage_lattice,
)

COEFFICIENT_KINDS = ("fix", "comack", "mack", "general")


class CoefficientTable:
    """Coefficient data for an encoded complex: values and action matrices.

    ``values`` maps declared class ids to FgAbelian groups; ``actions`` maps
    morphism labels to integer matrices.  A label with source class s and
    target class t acts contravariantly, as a map M(t) -> M(s) on ambient
    coordinates.
    """

    def __init__(self, values, actions, name="table"):
        self.values = {int(c): v for c, v in values.items()}
        self.actions = {}
        for label, mat in actions.items():
            if not isinstance(mat, IntMatrix):
                mat = IntMatrix([list(r) for r in mat])
            self.actions[str(label)] = mat
        self.name = name
        self._maps = {}

    def action_map(self, complex_, label) -> AbMap:
        """The action of a named morphism, shape-checked against the complex."""
        if label in self._maps:
            return self._maps[label]
        if label not in complex_.morphisms:
            raise ObjectMismatch(f"complex declares no morphism {label!r}")
        if label not in self.actions:
            raise IncompleteCoefficient(
                f"coefficient table {self.name!r} lacks an action for morphism {label!r}")
        src_cls, tgt_cls = complex_.morphisms[label]
        source = self.value(src_cls)
        target = self.value(tgt_cls)
        mat = self.actions[label]
        if mat.rows != source.ambient_rank or mat.cols != target.ambient_rank:
            raise AxiomViolation(
                f"action for {label!r} has shape {mat.rows}x{mat.cols}, "
                f"expected {source.ambient_rank}x{target.ambient_rank}")
        mp = AbMap(target, source, mat)
        if not mp.well_formed():
            raise AxiomViolation(f"action for {label!r} does not respect relations")
        self._maps[label] = mp
        return mp

    def value(self, class_id: int) -> FgAbelian:
        if class_id not in self.values:
            raise IncompleteCoefficient(
                f"coefficient table {self.name!r} has no value for class {class_id}")
        return self.values[class_id]

    @staticmethod
    def from_json(data) -> "CoefficientTable":
        values = {}
        for key, val in data["values"].items():
            rels = IntMatrix.from_columns(val.get("relations", []),
                                          rows=val["ambient"])
            values[int(key)] = FgAbelian.from_relations(val["ambient"], rels)
        actions = {}
        for label, mat in data.get("actions", {}).items():
            actions[label] = IntMatrix(mat["data"], cols=mat["cols"])
        return CoefficientTable(values, actions, name=data.get("name", "table"))

    def to_json(self):
        values = {}
        for cid in sorted(self.values):
            val = self.values[cid]
            values[str(cid)] = {
                "ambient": val.ambient_rank,
                "relations": [list(c) for c in val.relations.columns()],
            }
        actions = {}
        for label in sorted(self.actions):
            mat = self.actions[label]
            actions[label] = {"rows": mat.rows, "cols": mat.cols,
                              "data": mat.tolists()}
        return {"name": self.name, "values": values, "actions": actions}


class CoefficientSpec:
    """A coefficient system tagged with the class of structure behind it.

    kind "fix" wraps a GModule used through its fixed points, "comack" and
    "mack" wrap Mackey functors (comack is additionally certified
    cohomological at construction), "general" wraps a plain orbit module.
    Any kind may instead wrap a CoefficientTable for encoded complexes; the
    tag then records the declared classification of the table.
    """

    def __init__(self, kind: str, data, name: str = None):
        if kind not in COEFFICIENT_KINDS:
            raise ValueError(f"unknown coefficient kind {kind!r}")
        if isinstance(data, CoefficientTable):
            pass
        elif kind == "fix":
            if not isinstance(data, GModule):
                raise ObjectMismatch("fix coefficients wrap a GModule")
        elif kind in ("comack", "mack"):
            if not isinstance(data, MackeyFunctor):
                raise ObjectMismatch(f"{kind} coefficients wrap a MackeyFunctor")
            if kind == "comack" and not data.is_cohomological():
                raise NotCohomological(
                    "comack coefficient is not a cohomological Mackey functor")
        else:
            if not isinstance(data, CatModule):
                raise ObjectMismatch("general coefficients wrap a CatModule")
        self.kind = kind
        self.data = data
        self.name = name if name is not None else kind

    def to_orbit(self, group: Group, family: Family) -> CatModule:
        """The underlying orbit module over (group, family)."""
        data = self.data
        if isinstance(data, CoefficientTable):
            raise ObjectMismatch(
                "encoded coefficient tables pair with encoded complexes only")
        if self.kind == "fix":
            if data.group is not group:
                raise MismatchedParent("coefficient module belongs to a different group")
            functor = fixed_point_functor(data, family=family, validate=False)
            return functor.to_orbit_module()
        if self.kind in ("comack", "mack"):
            if data.group is not group:
                raise MismatchedParent("coefficient functor belongs to a different group")
            if data.family.class_ids == family.class_ids:
                return data.to_orbit_module()
            return data.to_orbit_module(family)
        if data.category.flavor != "orbit":
            raise ObjectMismatch("general coefficients live over an orbit category")
        if data.category.group is not group:
            raise MismatchedParent("coefficient module belongs to a different group")
        if data.category is orbit_category(group, family):
            return data
        return _restrict_orbit_module(data, family)

    def table(self) -> CoefficientTable:
        if not isinstance(self.data, CoefficientTable):
            raise ObjectMismatch(
                f"coefficient {self.name!r} carries no encoded table")
        return self.data


def _restrict_orbit_module(module: CatModule, family: Family) -> CatModule:
    # Between shared classes a subfamily has literally the same orbit maps,
    # so restriction is pure reindexing.
    big = module.category
    small = orbit_category(big.group, family)
    if not set(small.objects) <= set(big.objects):
        raise ObjectMismatch("family is not contained in the module's family")
    to_big = [big.obj_index[cls] for cls in small.objects]
    values = {i: module.values[to_big[i]] for i in range(small.object_count())}
    actions = {}
    for (a, b), basis in small.hom_basis.items():
        for j, m in enumerate(basis):
            big_a, big_b = to_big[a], to_big[b]
            idx = big.index_of(big_a, big_b,
                               OrbitMorphism(big_a, big_b, m.coset_rep))
            actions[(a, b, j)] = module.action(big_a, big_b, ((idx, 1),))
    return CatModule(small, values, actions)


def coefficient_module(coeff, group: Group, family: Family) -> CatModule:
    """Coerce any accepted coefficient form to an orbit module."""
    return as_coefficient_spec(coeff).to_orbit(group, family)


def as_coefficient_spec(coeff, name: str = None) -> CoefficientSpec:
    """Wrap raw data in a CoefficientSpec, inferring the weakest honest tag."""
    if isinstance(coeff, CoefficientSpec):
        return coeff
    if isinstance(coeff, GModule):
        return CoefficientSpec("fix", coeff, name or "fix")
    if isinstance(coeff, MackeyFunctor):
        return CoefficientSpec("mack", coeff, name or "mack")
    if isinstance(coeff, CatModule):
        return CoefficientSpec("general", coeff, name or "general")
    if isinstance(coeff, CoefficientTable):
        return CoefficientSpec("general", coeff, name or coeff.name)
    raise ObjectMismatch(f"not a coefficient: {type(coeff).__name__}")


# ---------------------------------------------------------------------------
# resolutions and cohomology for finite groups

_resolution_cache = {}
_resolution_lock = threading.Lock()


def cached_resolution(category, length: int, rank_bound: int = 2048):
    """Free resolution of the constant module, shared per category.

    A longer resolution than requested may be returned; cohomology in low
    degrees does not depend on the tail.  Safe for concurrent reads once
    built; concurrent builders race harmlessly (last write wins).
    """
    with _resolution_lock:
        hit = _resolution_cache.get(id(category))
    if hit is not None and hit[0] is category and hit[1].length() >= length:
        return hit[1]
    res = free_resolution(category, constant_module(category), length,
                          rank_bound=rank_bound)
    with _resolution_lock:
        _resolution_cache[id(category)] = (category, res)
    return res


def clear_resolution_cache():
    with _resolution_lock:
        _resolution_cache.clear()


def bredon_cohomology(group: Group, family: Family, coeff, degree: int,
                      rank_bound: int = 2048) -> FgAbelian:
    """H^degree of (group, family) with the given coefficient.

    The coefficient may be a CoefficientSpec, a GModule (used through its
    fixed points), a MackeyFunctor (transfers forgotten), or an orbit
    module.  A free resolution of the constant module is built once per
    orbit category and reused across degrees and coefficients.

    >>> from .grp import Family, group_from_generators
    >>> from .mackey import GModule
    >>> c2 = group_from_generators(["(1 2)"])
    >>> fam = Family.trivial(c2)
    >>> coeff = GModule.trivial(c2)
    >>> [bredon_cohomology(c2, fam, coeff, n).summary() for n in range(4)]
    ['Z', '0', 'Z/2', '0']

    Over the family of all subgroups the constant module is already free, so
    everything above degree zero dies:

    >>> [bredon_cohomology(c2, Family.all(c2), coeff, n).summary()
    ...  for n in range(3)]
    ['Z', '0', '0']
    """
    if degree < 0:
        raise DegreeOutOfRange(f"degree {degree} is negative")
    cat = orbit_category(group, family)
    module = coefficient_module(coeff, group, family)
    res = cached_resolution(cat, degree + 1, rank_bound=rank_bound)
    return cohomology(res, module, degree)


# ---------------------------------------------------------------------------
# encoded complexes for catalog infinite groups

class EncodedClass:
    """A declared conjugacy class of finite isotropy subgroups."""

    def __init__(self, ident: int, order: int, length: int,
                 name: str = None, weyl: str = "finite"):
        self.ident = int(ident)
        self.order = int(order)
        self.length = int(length)
        self.name = name if name is not None else str(ident)
        self.weyl = weyl

    def to_json(self):
        return {"id": self.ident, "name": self.name, "order": self.order,
                "length": self.length, "weyl": self.weyl}


class EncodedComplex:
    """A finite free cell structure over declared isotropy classes.

    ``cells[d]`` lists the class id of each d-cell.  A boundary entry
    ``(s, t, label, coeff)`` in degree d says: the boundary of d-cell s
    contains coeff times the image of (d-1)-cell t under the named orbit
    morphism, whose source class is the class of s and target class the
    class of t.  ``compositions[(first, then)]`` expands the composite of
    two labels into a combination of labels, enough to verify that the
    boundary squares to zero; the degree-one rows are checked against the
    augmentation instead (coefficient sums vanish).  Exactness of the whole
    resolution is declared data (``checked_exact``), not re-derived.
    """

    def __init__(self, name, classes, cells, morphisms, boundaries,
                 compositions=None, checked_exact=False, group=None,
                 battery=None):
        self.name = name
        self.classes = {}
        for cls in classes:
            if isinstance(cls, dict):
                cls = EncodedClass(cls["id"], cls["order"], cls["length"],
                                   name=cls.get("name"),
                                   weyl=cls.get("weyl", "finite"))
            self.classes[cls.ident] = cls
        self.cells = {int(k): [int(c) for c in v] for k, v in cells.items()}
        self.morphisms = {}
        for label, ends in morphisms.items():
            if isinstance(ends, dict):
                ends = (ends["source"], ends["target"])
            self.morphisms[str(label)] = (int(ends[0]), int(ends[1]))
        self.boundaries = {}
        for k, entries in boundaries.items():
            self.boundaries[int(k)] = [
                (int(s), int(t), str(label), int(c))
                for s, t, label, c in entries]
        self.compositions = {}
        for key, combo in (compositions or {}).items():
            first, then = key
            self.compositions[(str(first), str(then))] = {
                str(lab): int(c) for lab, c in dict(combo).items()}
        self.checked_exact = bool(checked_exact)
        self.group = group
        self.battery = list(battery) if battery else []
        self._validate()

    def dimension(self) -> int:
        return max(self.cells)

    def class_of_cell(self, degree: int, cell: int) -> int:
        return self.cells[degree][cell]

    def _validate(self):
        if not self.cells or 0 not in self.cells:
            raise AxiomViolation("complex needs degree-0 cells")
        dim = self.dimension()
        if set(self.cells) != set(range(dim + 1)):
            raise AxiomViolation("cell degrees must be contiguous from 0")
        for degree, ids in self.cells.items():
            for cid in ids:
                if cid not in self.classes:
                    raise AxiomViolation(
                        f"cell of degree {degree} uses undeclared class {cid}")
        for label, (src, tgt) in self.morphisms.items():
            if src not in self.classes or tgt not in self.classes:
                raise AxiomViolation(f"morphism {label!r} uses undeclared classes")
        for degree, entries in self.boundaries.items():
            if degree < 1 or degree > dim:
                raise AxiomViolation(f"boundary declared in empty degree {degree}")
            for s, t, label, c in entries:
                if not 0 <= s < len(self.cells[degree]):
                    raise AxiomViolation(
                        f"degree-{degree} boundary names missing cell {s}")
                if not 0 <= t < len(self.cells[degree - 1]):
                    raise AxiomViolation(
                        f"degree-{degree} boundary names missing face cell {t}")
                if label not in self.morphisms:
                    raise AxiomViolation(f"boundary uses undeclared morphism {label!r}")
                src, tgt = self.morphisms[label]
                if src != self.cells[degree][s] or tgt != self.cells[degree - 1][t]:
                    raise AxiomViolation(
                        f"morphism {label!r} does not match the classes of its cells")
        # augmentation rows: the constant module sends every orbit map to the
        # identity, so each 1-cell's coefficients must sum to zero
        for s in range(len(self.cells.get(1, []))):
            total = sum(c for (src, _, _, c) in self.boundaries.get(1, ())
                        if src == s)
            if total != 0:
                raise AxiomViolation(
                    f"corrupted boundary: 1-cell {s} does not augment to zero")
        # boundary squared, expanded through the declared composition facts
        for degree in range(2, dim + 1):
            for s in range(len(self.cells[degree])):
                acc = {}
                for s1, t1, lab1, c1 in self.boundaries.get(degree, ()):
                    if s1 != s:
                        continue
                    for s2, t2, lab2, c2 in self.boundaries.get(degree - 1, ()):
                        if s2 != t1:
                            continue
                        combo = self.compositions.get((lab1, lab2))
                        if combo is None:
                            raise AxiomViolation(
                                f"missing composition fact for {lab1!r} then {lab2!r}")
                        for lab, c3 in combo.items():
                            key = (t2, lab)
                            acc[key] = acc.get(key, 0) + c1 * c2 * c3
                if any(v != 0 for v in acc.values()):
                    raise AxiomViolation(
                        f"boundary squared nonzero on degree-{degree} cell {s}")

    @staticmethod
    def from_json(data) -> "EncodedComplex":
        group = None
        if "group" in data and data["group"] is not None:
            g = data["group"]
            group = EncodedGroup(g["name"], g.get("generators", []))
        compositions = {}
        for first, then, combo in data.get("compositions", []):
            compositions[(first, then)] = {lab: c for lab, c in combo}
        battery = []
        for entry in data.get("battery", []):
            table = CoefficientTable.from_json(entry)
            battery.append(CoefficientSpec(entry.get("kind", "general"),
                                           table, name=table.name))
        return EncodedComplex(
            data.get("name", "complex"),
            data["classes"],
            data["cells"],
            data["morphisms"],
            data["boundaries"],
            compositions=compositions,
            checked_exact=data.get("checked_exact", False),
            group=group,
            battery=battery,
        )

    def to_json(self):
        out = {
            "format": "bredonkit-complex/1",
            "name": self.name,
            "classes": [self.classes[c].to_json() for c in sorted(self.classes)],
            "cells": {str(k): list(v) for k, v in sorted(self.cells.items())},
            "morphisms": {label: {"source": src, "target": tgt}
                          for label, (src, tgt) in sorted(self.morphisms.items())},
            "boundaries": {str(k): [[s, t, label, c] for s, t, label, c in v]
                           for k, v in sorted(self.boundaries.items())},
            "compositions": [[first, then, sorted(combo.items())]
                             for (first, then), combo
                             in sorted(self.compositions.items())],
            "checked_exact": self.checked_exact,
        }
        if self.group is not None:
            out["group"] = self.group.to_json()
        if self.battery:
            out["battery"] = [dict(spec.table().to_json(), kind=spec.kind)
                              for spec in self.battery]
        return out


def load_complex(source) -> EncodedComplex:
    """Build an EncodedComplex from a dict, a JSON string, or a file path."""
    import json
    import os
    if isinstance(source, EncodedComplex):
        return source
    if isinstance(source, dict):
        return EncodedComplex.from_json(source)
    text = source
    if isinstance(source, str) and os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except ValueError as exc:
        raise ParseError(f"complex is not valid JSON: {exc}") from exc
    return EncodedComplex.from_json(data)


def bredon_cohomology_encoded(complex_: EncodedComplex, coeff,
                              degree: int) -> FgAbelian:
    """H^degree of an encoded complex with table coefficients.

    Cochains in degree k are the direct sum of coefficient values over the
    k-cells; the differential applies boundary entries through the named
    actions, contravariantly.  Above the dimension of the complex the answer
    is zero, because the declared resolution has no cells there.

    The infinite dihedral group acting on the line has two vertex classes
    (the two reflection conjugacy classes) and one free edge class:

    >>> line = EncodedComplex(
    ...     "line",
    ...     [EncodedClass(0, 1, 0, weyl="infinite"),
    ...      EncodedClass(1, 2, 1), EncodedClass(2, 2, 1)],
    ...     {0: [1, 2], 1: [0]},
    ...     {"pA": (0, 1), "pB": (0, 2)},
    ...     {1: [(0, 0, "pA", -1), (0, 1, "pB", 1)]},
    ...     checked_exact=True)
    >>> triv = CoefficientTable(
    ...     {0: FgAbelian.free(1), 1: FgAbelian.free(1), 2: FgAbelian.free(1)},
    ...     {"pA": [[1]], "pB": [[1]]}, name="Ztriv")
    >>> bredon_cohomology_encoded(line, triv, 0).summary()
    'Z'
    >>> bredon_cohomology_encoded(line, triv, 1).summary()
    '0'
    """
    if degree < 0:
        raise DegreeOutOfRange(f"degree {degree} is negative")
    if not complex_.checked_exact:
        raise AxiomViolation(
            "complex is not declared exact; refusing to report cohomology")
    spec = as_coefficient_spec(coeff)
    table = spec.table()
    dim = complex_.dimension()
    if degree > dim:
        return FgAbelian.zero()

    def cochain(k):
        ids = complex_.cells.get(k, [])
        starts, total = [], 0
        for cid in ids:
            starts.append(total)
            total += table.value(cid).ambient_rank
        rel_cols = []
        for idx, cid in enumerate(ids):
            rel = table.value(cid).relations
            for j in range(rel.cols):
                vec = [0] * total
                for r in range(rel.rows):
                    vec[starts[idx] + r] = rel.data[r][j]
                rel_cols.append(vec)
        return (FgAbelian(total, IntMatrix.from_columns(rel_cols, rows=total)),
                starts)

    def differential(k):
        ck, sk = cochain(k)
        ck1, sk1 = cochain(k + 1)
        mat = [[0] * ck.ambient_rank for _ in range(ck1.ambient_rank)]
        for s, t, label, c in complex_.boundaries.get(k + 1, ()):
            step = table.action_map(complex_, label)  # M(face) -> M(cell)
            for r in range(step.matrix.rows):
                for col in range(step.matrix.cols):
                    v = step.matrix.data[r][col]
                    if v:
                        mat[sk1[s] + r][sk[t] + col] += c * v
        return AbMap(ck, ck1, IntMatrix(mat, cols=ck.ambient_rank))

    ck, _ = cochain(degree)
    if degree < dim:
        ker = preimage_lattice(differential(degree))
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


# ---------------------------------------------------------------------------
# comparison reports

class ComparisonRow:
    __slots__ = ("label", "degree", "left", "right")

    def __init__(self, label, degree, left, right):
        self.label = label
        self.degree = degree
        self.left = tuple(left)
        self.right = tuple(right)

    @property
    def ok(self) -> bool:
        return self.left == self.right


class ComparisonReport:
    """Degree-by-degree normal forms for two routes to the same cohomology."""

    def __init__(self, name, context, rows):
        self.name = name
        self.context = dict(context)
        self.rows = list(rows)

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)

    def summary(self):
        return {
            "name": self.name,
            "context": self.context,
            "ok": self.ok,
            "rows": [{"label": r.label, "degree": r.degree,
                      "left": list(r.left), "right": list(r.right),
                      "ok": r.ok} for r in self.rows],
        }


_embedding_cache = {}


def subgroup_embedding(group: Group, handle: SubgroupHandle,
                       family: Family) -> SubgroupEmbedding:
    """Cached embedding, so coefficients built over .subgroup stay composable."""
    key = (id(group), handle.sub_id, frozenset(family.class_ids))
    if key not in _embedding_cache:
        _embedding_cache[key] = SubgroupEmbedding(group, handle, family)
    return _embedding_cache[key]


def coinduce_coefficient(emb: SubgroupEmbedding, spec) -> CoefficientSpec:
    """Coinduction along the embedding, matched to the coefficient's class."""
    spec = as_coefficient_spec(spec)
    name = f"coind:{spec.name}"
    if spec.kind == "fix":
        return CoefficientSpec("fix", gmodule_coinduce(emb, spec.data), name)
    if spec.kind in ("comack", "mack"):
        return CoefficientSpec(spec.kind, mackey_coinduce(emb, spec.data), name)
    small = orbit_category(emb.subgroup, emb.family)
    big = orbit_category(emb.parent, emb.parent_family)
    module = spec.to_orbit(emb.subgroup, emb.family)
    lifted = coinduce_along(inclusion_functor(emb, small, big), module)
    return CoefficientSpec("general", lifted, name)


def shapiro_check(group: Group, handle: SubgroupHandle, family: Family,
                  coeff, max_degree: int = 3) -> ComparisonReport:
    """Compare cohomology of a subgroup with that of the coinduced coefficient.

    ``coeff`` is a coefficient over the subgroup: either data whose group is
    ``subgroup_embedding(group, handle, family).subgroup``, or a callable
    that builds such data when handed that group.  Both sides are computed
    from their own resolutions degree by degree.
    """
    emb = subgroup_embedding(group, handle, family)
    if callable(coeff) and not isinstance(
            coeff, (CoefficientSpec, GModule, MackeyFunctor, CatModule)):
        coeff = coeff(emb.subgroup)
    spec = as_coefficient_spec(coeff)
    lifted = coinduce_coefficient(emb, spec)
    rows = []
    for n in range(max_degree + 1):
        left = bredon_cohomology(emb.subgroup, emb.family, spec, n)
        right = bredon_cohomology(group, family, lifted, n)
        rows.append(ComparisonRow(spec.name, n,
                                  left.invariant_factors,
                                  right.invariant_factors))
    context = {
        "group_order": group.order,
        "subgroup_order": handle.order,
        "index": handle.index_in_parent,
        "family_classes": sorted(family.class_ids),
        "coefficient": spec.name,
        "kind": spec.kind,
    }
    return ComparisonReport("shapiro", context, rows)


def pullback_family(group: Group, qdata, family_q: Family) -> Family:
    """Classes of subgroups whose image under the projection lies in family_q."""
    quotient = qdata.group
    classes = set()
    for cls in range(group.num_subgroup_classes()):
        sid = group.class_rep(cls)
        members = frozenset(qdata.project[x] for x in group.subgroups[sid])
        q_sid = quotient.subgroup_id(members)
        if family_q.contains_class(quotient.class_of_subgroup(q_sid)):
            classes.add(cls)
    return Family(group, classes)


def finite_kernel_check(group: Group, normal: SubgroupHandle, battery=None,
                        max_degree: int = 2,
                        family: Family = None) -> ComparisonReport:
    """Collapse a finite normal subgroup: quotient cohomology must survive.

    For each battery coefficient N over the quotient Q = group/normal with
    the chosen family there, H^n of (Q, family, N) is compared with H^n of
    the whole group over the pulled-back family, with coefficient N
    restricted along the quotient functor.
    """
    qdata = quotient_data(group, normal)
    quotient = qdata.group
    fam_q = family if family is not None else Family.trivial(quotient)
    fam_pre = pullback_family(group, qdata, fam_q)
    gamma_cat = orbit_category(group, fam_pre)
    q_cat = orbit_category(quotient, fam_q)
    functor = quotient_functor(qdata, gamma_cat, q_cat)
    specs = battery if battery is not None else default_battery(quotient, fam_q)
    if not specs:
        raise ValueError("battery must be nonempty")
    rows = []
    for spec in specs:
        spec = as_coefficient_spec(spec)
        module = spec.to_orbit(quotient, fam_q)
        pulled = restrict_along(functor, module)
        for n in range(max_degree + 1):
            left = bredon_cohomology(group, fam_pre, pulled, n)
            right = bredon_cohomology(quotient, fam_q, module, n)
            rows.append(ComparisonRow(spec.name, n,
                                      left.invariant_factors,
                                      right.invariant_factors))
    context = {
        "group_order": group.order,
        "kernel_order": normal.order,
        "quotient_order": quotient.order,
        "quotient_family_classes": sorted(fam_q.class_ids),
        "pullback_classes": sorted(fam_pre.class_ids),
    }
    return ComparisonReport("finite-kernel", context, rows)


# ---------------------------------------------------------------------------
# dimension reports

class DimensionReport:
    """Witnessed lower bounds per coefficient class, with upper-bound data.

    Witness degrees are lower bounds found on a finite battery, never the
    true supremum over all coefficients.  ``resolution_length`` is an upper
    bound only when the resolution terminated (trailing kernel vanished) or
    the entry is an encoded complex of declared finite length.
    """

    def __init__(self, entry_name, max_degree, witnesses, tables,
                 battery_names, resolution_length, resolution_terminated,
                 consistency):
        self.entry_name = entry_name
        self.max_degree = max_degree
        self.witnesses = witnesses
        self.tables = tables
        self.battery_names = battery_names
        self.resolution_length = resolution_length
        self.resolution_terminated = resolution_terminated
        self.consistency = list(consistency)
        degrees = [w["degree"] for w in
                   (witnesses[kind] for kind in COEFFICIENT_KINDS)
                   if w is not None]
        if degrees != sorted(degrees):
            raise AxiomViolation("witness degrees violate the class ordering")

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.consistency)

    def witness_degrees(self):
        return tuple(self.witnesses[kind]["degree"]
                     if self.witnesses[kind] is not None else None
                     for kind in COEFFICIENT_KINDS)

    def summary(self):
        return {
            "entry": self.entry_name,
            "max_degree": self.max_degree,
            "witnesses": {kind: self.witnesses[kind] for kind in COEFFICIENT_KINDS},
            "tables": self.tables,
            "battery": self.battery_names,
            "resolution_length": self.resolution_length,
            "resolution_terminated": self.resolution_terminated,
            "consistency": [{"check": name, "ok": passed, "detail": detail}
                            for name, passed, detail in self.consistency],
            "ok": self.ok,
        }


def _witnesses_from_tables(specs, tables):
    # best witnessed degree per kind, then cascaded so the chain
    # fix <= comack <= mack <= general holds by construction
    best = {kind: None for kind in COEFFICIENT_KINDS}
    for spec in specs:
        row = tables[spec.name]
        found = None
        for n, factors in enumerate(row):
            if factors:
                found = n
        if found is None:
            continue
        cur = best[spec.kind]
        if cur is None or found > cur["degree"]:
            best[spec.kind] = {"degree": found, "coefficient": spec.name,
                               "status": "witnessed lower bound"}
    running = None
    witnesses = {}
    for kind in COEFFICIENT_KINDS:
        cand = best[kind]
        if cand is not None and (running is None
                                 or cand["degree"] >= running["degree"]):
            running = cand
        witnesses[kind] = dict(running) if running is not None else None
    return witnesses


def dimension_report(entry, battery=None, max_degree: int = None,
                     rank_bound: int = 2048) -> DimensionReport:
    """Lower-bound witnesses for the four dimension notions on one entry.

    ``entry`` is a catalog name, an EncodedComplex, or a (group, family)
    pair.  Every battery coefficient is evaluated in all degrees up to
    ``max_degree``; the report keeps the full tables, the best witness per
    coefficient class, and the consistency checks that tie witnesses to the
    available upper bounds.
    """
    if isinstance(entry, str):
        from .catalog import catalog_entry
        kind, payload = catalog_entry(entry)
        if kind == "encoded":
            entry = payload
        else:
            entry = (payload, Family.all(payload))
    if isinstance(entry, EncodedComplex):
        return _dimension_report_encoded(entry, battery, max_degree)
    group, family = entry
    if max_degree is None:
        max_degree = group_length(group) + 1
    specs = [as_coefficient_spec(s) for s in battery] if battery is not None \
        else default_battery(group, family)
    if not specs:
        raise ValueError("battery must be nonempty")
    cat = orbit_category(group, family)
    res = cached_resolution(cat, max_degree + 1, rank_bound=rank_bound)
    tables = {}
    for spec in specs:
        module = spec.to_orbit(group, family)
        tables[spec.name] = [
            list(cohomology(res, module, n).invariant_factors)
            for n in range(max_degree + 1)]
    witnesses = _witnesses_from_tables(specs, tables)
    first_empty = next((k for k in range(len(res.cells)) if not res.cells[k]),
                       None)
    terminated = first_empty is not None
    resolution_length = first_empty - 1 if terminated else None
    consistency = [_ordering_check(witnesses)]
    if family.is_all():
        bound = group_length(group)
        consistency.append(_bound_check(
            "length-orbit bound", witnesses, bound,
            f"witnesses must not exceed l(G) = {bound} over the full family"))
    if terminated:
        consistency.append(_bound_check(
            "resolution upper bound", witnesses, resolution_length,
            f"resolution terminated at length {resolution_length}"))
    name = f"{group.name or 'group'}|" \
           f"family={','.join(str(c) for c in sorted(family.class_ids))}"
    return DimensionReport(name, max_degree, witnesses, tables,
                           _battery_names(specs), resolution_length,
                           terminated, consistency)


def _dimension_report_encoded(complex_, battery, max_degree):
    specs = [as_coefficient_spec(s) for s in battery] if battery is not None \
        else list(complex_.battery)
    if not specs:
        raise ValueError("battery must be nonempty")
    dim = complex_.dimension()
    if max_degree is None:
        max_degree = dim
    tables = {}
    for spec in specs:
        tables[spec.name] = [
            list(bredon_cohomology_encoded(complex_, spec, n).invariant_factors)
            for n in range(max_degree + 1)]
    witnesses = _witnesses_from_tables(specs, tables)
    consistency = [_ordering_check(witnesses)]
    consistency.append(_bound_check(
        "complex dimension bound", witnesses, dim,
        f"no cells above degree {dim}"))
    finite_weyl = [cls.length for cls in complex_.classes.values()
                   if cls.weyl == "finite"]
    if finite_weyl:
        bound = max(finite_weyl)
        consistency.append(_bound_check(
            "length-orbit witness bound", witnesses, bound,
            "declared lengths of finite-Weyl classes cap the witnesses"))
    return DimensionReport(complex_.name, max_degree, witnesses, tables,
                           _battery_names(specs), dim, True, consistency)


def _battery_names(specs):
    return [{"name": spec.name, "kind": spec.kind} for spec in specs]


def _ordering_check(witnesses):
    degrees = [witnesses[kind]["degree"] for kind in COEFFICIENT_KINDS
               if witnesses[kind] is not None]
    return ("class ordering", degrees == sorted(degrees),
            "fix <= comack <= mack <= general")


def _bound_check(name, witnesses, bound, detail):
    worst = max((witnesses[kind]["degree"] for kind in COEFFICIENT_KINDS
                 if witnesses[kind] is not None), default=0)
    return (name, worst <= bound, detail)


def default_battery(group: Group, family: Family):
    """The stock coefficient battery for a finite group and family.

    Fixed-point side: the trivial module, one sign module per index-two
    subgroup class, and the coset permutation module of every family class.
    Each of those also contributes its fixed-point and coinvariance Mackey
    functors; a free Mackey module and the free orbit modules of the family
    classes round out the stronger classes.
    """
    specs = [CoefficientSpec("fix", GModule.trivial(group), "Ztriv")]
    for cls in range(group.num_subgroup_classes()):
        handle = SubgroupHandle(group, group.class_rep(cls))
        if handle.index_in_parent == 2:
            specs.append(CoefficientSpec(
                "fix", GModule.one_dimensional(group, handle), f"sign:{cls}"))
    for cls in family.sorted_classes():
        handle = SubgroupHandle(group, group.class_rep(cls))
        specs.append(CoefficientSpec(
            "fix", GModule.permutation(group, handle), f"perm:{cls}"))
    for spec in list(specs):
        specs.append(CoefficientSpec(
            "comack",
            fixed_point_functor(spec.data, family=family, validate=False),
            f"fp:{spec.name}"))
        specs.append(CoefficientSpec(
            "comack",
            coinvariance_functor(spec.data, family=family, validate=False),
            f"coinv:{spec.name}"))
    mcat = mackey_category(group, family)
    free_mackey = MackeyFunctor(
        mcat, free_module(mcat, [mcat.object_count() - 1]).module, check=False)
    specs.append(CoefficientSpec("mack", free_mackey, "free-mackey"))
    orb = orbit_category(group, family)
    for obj in range(orb.object_count()):
        specs.append(CoefficientSpec(
            "general", free_module(orb, [obj]).module,
            f"free-orbit:{orb.objects[obj]}"))
    return specs
