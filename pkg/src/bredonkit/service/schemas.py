"""Request and response shapes for the HTTP service.

Every body the service accepts or returns is plain JSON; the models here
pin those shapes so the CLI client and the golden-file tests can rely on
them.  Heavily nested payloads (category dumps, dimension reports, tower
summaries) stay free-form dicts produced by the kernel itself.
"""

from pydantic import BaseModel, ConfigDict, Field


class GroupSpec(BaseModel):
    """A group named from the catalog or presented by generators.

    Exactly one of ``name`` and ``gens`` should be set; ``gens`` is either
    a list of cycle strings or one comma-separated string.  ``bound``
    overrides the element-count guard for this request only.
    """

    name: str | None = None
    gens: list[str] | str | None = None
    bound: int | None = None


class GroupRequest(BaseModel):
    group: GroupSpec


class CategoryRequest(BaseModel):
    group: GroupSpec
    family: str = "all"
    flavor: str = "orbit"
    dump: bool = False


class MackeyCheckRequest(BaseModel):
    """Check a named functor, or explicit tables sent as JSON."""

    group: GroupSpec | None = None
    family: str = "all"
    functor: str = "burnside"
    tables: dict | None = None


class MackeyCoverRequest(BaseModel):
    group: GroupSpec
    family: str = "all"
    functor: str = "coinv:Ztriv"


class MackeyTowerRequest(BaseModel):
    group: GroupSpec
    family: str = "all"
    coeff: str = "Ztriv"
    depth: int | None = None


class CohomologyRequest(BaseModel):
    group: GroupSpec
    family: str = "all"
    coeff: str = "Ztriv"
    degrees: str = "0..2"


class EncodedRequest(BaseModel):
    """A catalog complex by name, or a full complex document inline."""

    model_config = ConfigDict(populate_by_name=True)

    complex_: str | dict = Field(alias="complex")
    coeff: str | None = None
    degrees: str | None = None


class ReportRequest(BaseModel):
    entry: str | GroupSpec
    family: str = "all"
    max_degree: int | None = None


class VerifyRequest(BaseModel):
    lemma: str | None = None
    group: str | None = None


class HealthResponse(BaseModel):
    status: str
    version: str


class CatalogResponse(BaseModel):
    groups: list[str]
    complexes: list[str]
    lemmas: list[str]


class GroupInfoResponse(BaseModel):
    name: str
    order: int
    degree: int
    num_subgroups: int
    num_subgroup_classes: int
    length: int


class SubgroupClassRow(BaseModel):
    class_id: int
    order: int
    index: int
    count: int
    normal: bool
    length: int


class SubgroupsResponse(BaseModel):
    name: str
    classes: list[SubgroupClassRow]


class LengthResponse(BaseModel):
    name: str
    length: int


class CohomologyRow(BaseModel):
    degree: int
    coefficient: str
    invariant_factors: list[int]
    summary: str


class CohomologyResponse(BaseModel):
    entry: str
    family: str
    rows: list[CohomologyRow]


class EncodedResponse(BaseModel):
    entry: str
    dimension: int
    rows: list[CohomologyRow]


class CheckRow(BaseModel):
    name: str
    ok: bool
    details: str
    seconds: float


class VerifyResponse(BaseModel):
    ok: bool
    results: list[CheckRow]
