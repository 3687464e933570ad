"""HTTP front end over the kernel.

The service holds no state of its own: groups, categories, and resolutions
are all memoized by the library, so repeated requests against the same
catalog entries stay cheap.  Kernel errors surface as JSON bodies carrying
the exception name.  Malformed input maps to 422, inputs that parse but
fail an axiom or verification check map to 409, and resource guards map to
413; the CLI turns those into its documented exit codes.

Run standalone with ``uvicorn bredonkit.service.app:app``.
"""

import re

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bredon import (
    CoefficientSpec,
    bredon_cohomology,
    bredon_cohomology_encoded,
    default_battery,
    dimension_report,
    load_complex,
)
from ..catalog import catalog_complex, catalog_group, catalog_names, is_encoded_name
from ..cats import mackey_category, orbit_category
from ..errors import (
    AxiomViolation,
    BredonkitError,
    ExplosionError,
    NotCohomological,
    NotNormal,
    ParseError,
    ResourceError,
)
from ..fmod import free_module, nat_is_surjective
from ..grp import (
    Family,
    Group,
    SubgroupHandle,
    group_from_generators,
    group_length,
    length,
)
from ..mackey import (
    GModule,
    MackeyFunctor,
    burnside_functor,
    coinvariance_functor,
    d_tower,
    fixed_point_cover,
    fixed_point_functor,
    mackey_from_tables,
)
from ..verify import LEMMAS, run_all, run_lemma
from .schemas import (
    CatalogResponse,
    CategoryRequest,
    CheckRow,
    CohomologyRequest,
    CohomologyResponse,
    CohomologyRow,
    EncodedRequest,
    EncodedResponse,
    GroupInfoResponse,
    GroupRequest,
    GroupSpec,
    HealthResponse,
    LengthResponse,
    MackeyCheckRequest,
    MackeyCoverRequest,
    MackeyTowerRequest,
    ReportRequest,
    SubgroupClassRow,
    SubgroupsResponse,
    VerifyRequest,
    VerifyResponse,
)

# ---------------------------------------------------------------------------
# request decoding

_RANGE = re.compile(r"(\d+)\.\.(\d+)")


def resolve_group(spec: GroupSpec) -> Group:
    if spec is None or (spec.name is None and spec.gens is None):
        raise ParseError(
            "a group is required; pass a catalog --group name or --gens")
    if spec.name is not None and spec.gens is not None:
        raise ParseError("pass either a catalog name or --gens, not both")
    if spec.name is not None:
        return catalog_group(spec.name, bound=spec.bound)
    return group_from_generators(spec.gens, bound=spec.bound)


def resolve_family(group: Group, text) -> Family:
    """'all', 'trivial', or comma-separated subgroup class ids."""
    if isinstance(text, Family):
        return text
    if isinstance(text, (list, tuple)):
        return Family(group, text)
    text = (text or "all").strip()
    if text == "all":
        return Family.all(group)
    if text == "trivial":
        return Family.trivial(group)
    try:
        ids = [int(p) for p in text.split(",")]
    except ValueError:
        raise ParseError(
            f"--family expects 'all', 'trivial', or class ids, got {text!r}")
    return Family(group, ids)


def parse_degrees(text: str) -> list:
    text = str(text).strip()
    m = _RANGE.fullmatch(text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
    else:
        try:
            lo = hi = int(text)
        except ValueError:
            raise ParseError(f"--degrees expects N or LO..HI, got {text!r}")
    if hi < lo:
        raise ParseError(f"--degrees range {text!r} is empty")
    return list(range(lo, hi + 1))


def resolve_gmodule(group: Group, name: str) -> GModule:
    """Named modules: Ztriv, regular, sign:<class>, perm:<class>."""
    if name in ("Ztriv", "trivial"):
        return GModule.trivial(group)
    if name == "regular":
        return GModule.regular(group)
    m = re.fullmatch(r"(sign|perm):(\d+)", name)
    if m:
        cls = int(m.group(2))
        if not 0 <= cls < group.num_subgroup_classes():
            raise ParseError(f"no subgroup class {cls} in this group")
        handle = SubgroupHandle(group, group.class_rep(cls))
        if m.group(1) == "perm":
            return GModule.permutation(group, handle)
        return GModule.one_dimensional(group, handle)
    raise ParseError(
        f"unknown module {name!r}; use Ztriv, regular, sign:<class>, perm:<class>")


def resolve_functor(group: Group, family: Family, name: str) -> MackeyFunctor:
    """Named span functors: burnside, free, fp:<module>, coinv:<module>."""
    if name == "burnside":
        return burnside_functor(group)
    if name == "free":
        cat = mackey_category(group, family)
        free = free_module(cat, [cat.object_count() - 1])
        return MackeyFunctor(cat, free.module, check=False)
    if name.startswith("fp:"):
        return fixed_point_functor(resolve_gmodule(group, name[3:]), family=family)
    if name.startswith("coinv:"):
        return coinvariance_functor(resolve_gmodule(group, name[6:]), family=family)
    raise ParseError(
        f"unknown --functor {name!r}; use burnside, free, fp:<module>, "
        "coinv:<module>")


def resolve_coefficient(group: Group, family: Family, name: str) -> CoefficientSpec:
    specs = {spec.name: spec for spec in default_battery(group, family)}
    if name in specs:
        return specs[name]
    if name == "regular":
        return CoefficientSpec("fix", GModule.regular(group), "regular")
    if name == "burnside":
        return CoefficientSpec("mack", burnside_functor(group), "burnside")
    raise ParseError(
        f"--coeff {name!r} is not a battery name; this group and family "
        f"offer {sorted(specs)} plus 'regular' and 'burnside'")


def _pair_key(text, table):
    parts = str(text).split(",")
    try:
        a, b = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"{table} table keys look like 'a,b', got {text!r}")
    return (a, b)


def decode_tables(raw: dict) -> dict:
    """JSON form of a span-functor table file to mackey_from_tables input.

    Pair keys arrive as 'a,b' strings because JSON objects cannot key on
    tuples; values are keyed by subgroup id.
    """
    if "group" not in raw:
        raise ParseError("tables need a 'group' entry (catalog name or generators)")
    group = raw["group"]
    if isinstance(group, str) and "(" not in group:
        group = catalog_group(group)
    data = {"group": group, "family": raw.get("family", "all"),
            "values": {int(k): v for k, v in raw.get("values", {}).items()}}
    for table in ("res", "ind", "conj"):
        if table in raw:
            data[table] = {_pair_key(k, table): v for k, v in raw[table].items()}
    return data


def _resolve_complex(source):
    if isinstance(source, str):
        return catalog_complex(source)
    return load_complex(source)


def _functor_values(mf: MackeyFunctor) -> list:
    rows = []
    for obj in range(mf.category.object_count()):
        value = mf.module.values[obj]
        rows.append({"class_id": mf.category.objects[obj],
                     "invariant_factors": list(value.invariant_factors),
                     "summary": value.summary()})
    return rows


def _family_label(family: Family) -> str:
    return ",".join(str(c) for c in family.sorted_classes())


def _group_label(group: Group) -> str:
    return group.name or "anonymous"


# ---------------------------------------------------------------------------
# the application

app = FastAPI(title="bredonkit", version=__version__)

_VERIFY_ERRORS = (AxiomViolation, NotCohomological, NotNormal)
_RESOURCE_ERRORS = (ExplosionError, ResourceError)


@app.exception_handler(BredonkitError)
async def kernel_error(request: Request, exc: BredonkitError):
    if isinstance(exc, _VERIFY_ERRORS):
        status = 409
    elif isinstance(exc, _RESOURCE_ERRORS):
        status = 413
    else:
        status = 422
    return JSONResponse(status_code=status,
                        content={"error": type(exc).__name__, "detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health():
    return HealthResponse(status="ok", version=__version__)


@app.get("/catalog", response_model=CatalogResponse)
def catalog():
    names = catalog_names()
    return CatalogResponse(
        groups=[n for n in names if not is_encoded_name(n)],
        complexes=[n for n in names if is_encoded_name(n)],
        lemmas=sorted(LEMMAS))


@app.post("/group/info", response_model=GroupInfoResponse)
def group_info(req: GroupRequest):
    g = resolve_group(req.group)
    return GroupInfoResponse(
        name=_group_label(g), order=g.order, degree=g.degree,
        num_subgroups=len(g.subgroups),
        num_subgroup_classes=g.num_subgroup_classes(),
        length=group_length(g))


@app.post("/group/subgroups", response_model=SubgroupsResponse)
def group_subgroups(req: GroupRequest):
    g = resolve_group(req.group)
    full = g.full_handle()
    _, reps = g.subgroup_class_data
    rows = []
    for cls in range(g.num_subgroup_classes()):
        handle = SubgroupHandle(g, g.class_rep(cls))
        rows.append(SubgroupClassRow(
            class_id=cls, order=handle.order, index=handle.index_in_parent,
            count=len(reps[cls]), normal=handle.is_normal_in(full),
            length=length(handle)))
    return SubgroupsResponse(name=_group_label(g), classes=rows)


@app.post("/group/length", response_model=LengthResponse)
def group_len(req: GroupRequest):
    g = resolve_group(req.group)
    return LengthResponse(name=_group_label(g), length=group_length(g))


@app.post("/cats/dump")
def cats_dump(req: CategoryRequest):
    g = resolve_group(req.group)
    family = resolve_family(g, req.family)
    if req.flavor == "orbit":
        cat = orbit_category(g, family)
    elif req.flavor == "mackey":
        cat = mackey_category(g, family)
    else:
        raise ParseError(f"category flavor is orbit or mackey, got {req.flavor!r}")
    if req.dump:
        return cat.dump()
    n = cat.object_count()
    return {
        "flavor": cat.flavor,
        "objects": [
            {"class_id": c,
             "subgroup_order": len(g.subgroups[cat.rep_sub[i]])}
            for i, c in enumerate(cat.objects)],
        "hom_ranks": {f"{a},{b}": cat.hom_rank(a, b)
                      for a in range(n) for b in range(n)},
    }


@app.post("/mackey/check")
def mackey_check(req: MackeyCheckRequest):
    if req.tables is not None:
        mf = mackey_from_tables(decode_tables(req.tables))
        label = "tables"
    else:
        g = resolve_group(req.group)
        family = resolve_family(g, req.family)
        mf = resolve_functor(g, family, req.functor)
        label = req.functor
    return {
        "functor": label,
        "group": _group_label(mf.group),
        "family": _family_label(mf.family),
        "valid": True,
        "cohomological": mf.is_cohomological(),
        "values": _functor_values(mf),
    }


@app.post("/mackey/cover")
def mackey_cover(req: MackeyCoverRequest):
    g = resolve_group(req.group)
    family = resolve_family(g, req.family)
    mf = resolve_functor(g, family, req.functor)
    source, tau = fixed_point_cover(mf)
    return {
        "functor": req.functor,
        "group": _group_label(g),
        "surjective": nat_is_surjective(tau),
        "source_values": _functor_values(source),
        "target_values": _functor_values(mf),
    }


@app.post("/mackey/tower")
def mackey_tower(req: MackeyTowerRequest):
    g = resolve_group(req.group)
    family = resolve_family(g, req.family)
    spec = resolve_coefficient(g, family, req.coeff)
    module = spec.to_orbit(g, family)
    depth = req.depth if req.depth is not None else group_length(g)
    if depth < 0:
        raise ParseError(f"--depth must be nonnegative, got {depth}")
    report = d_tower(module, depth)
    out = report.summary()
    out.update(group=_group_label(g), coefficient=spec.name, depth=depth)
    return out


@app.post("/cohomology/compute", response_model=CohomologyResponse)
def cohomology_compute(req: CohomologyRequest):
    g = resolve_group(req.group)
    family = resolve_family(g, req.family)
    degrees = parse_degrees(req.degrees)
    spec = resolve_coefficient(g, family, req.coeff)
    rows = []
    for n in degrees:
        value = bredon_cohomology(g, family, spec, n)
        rows.append(CohomologyRow(
            degree=n, coefficient=spec.name,
            invariant_factors=list(value.invariant_factors),
            summary=value.summary()))
    return CohomologyResponse(entry=_group_label(g),
                              family=_family_label(family), rows=rows)


@app.post("/cohomology/encoded", response_model=EncodedResponse)
def cohomology_encoded(req: EncodedRequest):
    complex_ = _resolve_complex(req.complex_)
    dim = complex_.dimension()
    degrees = parse_degrees(req.degrees) if req.degrees is not None \
        else list(range(dim + 1))
    specs = list(complex_.battery)
    if req.coeff is not None:
        specs = [s for s in specs if s.name == req.coeff]
        if not specs:
            names = [s.name for s in complex_.battery]
            raise ParseError(
                f"--coeff {req.coeff!r} is not in this complex's battery {names}")
    elif not specs:
        raise ParseError("complex carries no coefficient battery")
    rows = []
    for spec in specs:
        for n in degrees:
            value = bredon_cohomology_encoded(complex_, spec, n)
            rows.append(CohomologyRow(
                degree=n, coefficient=spec.name,
                invariant_factors=list(value.invariant_factors),
                summary=value.summary()))
    return EncodedResponse(entry=complex_.name, dimension=dim, rows=rows)


@app.post("/report/dimension")
def report_dimension(req: ReportRequest):
    if isinstance(req.entry, str):
        report = dimension_report(req.entry, max_degree=req.max_degree)
    else:
        g = resolve_group(req.entry)
        family = resolve_family(g, req.family)
        report = dimension_report((g, family), max_degree=req.max_degree)
    return report.summary()


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    if req.lemma is None:
        results = run_all()
    else:
        results = [run_lemma(req.lemma, group=req.group)]
    return VerifyResponse(ok=all(r.ok for r in results),
                          results=[CheckRow(**r.to_json()) for r in results])
