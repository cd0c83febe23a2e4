"""
JSON wire documents read and written by the command line

Rationals travel as "p/q" strings (integer strings when q = 1) and grid
points as comma-joined coordinates such as "2,0,1".
"""

import itertools
from fractions import Fraction
from typing import Any, Literal
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field

from ..errors import DocumentError
from ..services.polytope_service import polytope_service
from ..utils.rationals import format_point, parse_point, render_rational, to_fraction
from .decomposition import ConstraintCensus, ConvexCombination, MonotoneGaiDecomposition, WeightedVertex
from .elicitation import CategoryAssignment, ElicitationResult, PreferenceDataset, PreferencePair
from .gai import Attribute, AttributeSpace, GaiModel, GaiTerm, TabulatedFunction
from .grid import CapacityReport, KaryGame, MobiusMap
from .lp import LpCertificate
from .polytope import Antichain, VertexCapacity, VertexCensus


def _render_map(items: Any, digits: int | None) -> dict[str, str]:
    return {format_point(z): render_rational(value, digits) for z, value in items}


def _parse_map(values: dict[str, str]) -> dict[tuple[int, ...], Fraction]:
    return {parse_point(key): to_fraction(value) for key, value in values.items()}


def _cell(parsed: dict[tuple[int, ...], Fraction], cell: tuple[int, ...], table: str) -> Fraction:
    if cell not in parsed:
        raise DocumentError(f"Table of {table} is missing cell {format_point(cell)}", {"cell": format_point(cell)})
    return parsed[cell]


def _check_attributes(attributes: tuple[int, ...], n: int) -> None:
    if any(not 0 <= i < n for i in attributes) or list(attributes) != sorted(set(attributes)):
        raise DocumentError(f"Term attributes {list(attributes)} are not increasing indices below n={n}")


class GameDocument(BaseModel):
    """A k-ary game or capacity with every grid point present"""

    model_config = ConfigDict(
        json_schema_extra={"example": {"n": 1, "k": 2, "values": {"0": "0", "1": "1/2", "2": "1"}}}
    )

    n: int = Field(..., ge=1, description="Number of attributes")
    k: int = Field(..., ge=1, description="Level bound")
    values: dict[str, str] = Field(..., description="Value per grid point")
    p_additivity_degree: int | None = Field(None, description="Reported after embedding")

    @classmethod
    def from_domain(cls, game: KaryGame, digits: int | None = None, degree: int | None = None) -> Self:
        return cls(n=game.n, k=game.k, values=_render_map(game.items(), digits), p_additivity_degree=degree)

    def to_domain(self) -> KaryGame:
        return KaryGame.from_mapping(self.n, self.k, _parse_map(self.values))


class MobiusDocument(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={"example": {"n": 2, "k": 1, "mobius": {"0,1": "1", "1,0": "1", "1,1": "-1"}}}
    )

    n: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    mobius: dict[str, str] = Field(..., description="Nonzero Möbius coefficients")

    @classmethod
    def from_domain(cls, m: MobiusMap, digits: int | None = None) -> Self:
        return cls(n=m.n, k=m.k, mobius=_render_map(m.atoms(), digits))

    def to_domain(self) -> MobiusMap:
        return MobiusMap(n=self.n, k=self.k, coefficients=_parse_map(self.mobius))


class ViolationDocument(BaseModel):
    points: list[str]
    description: str


class CapacityReportDocument(BaseModel):
    zero_grounded: bool
    monotone: bool
    normalized: bool
    violations: list[ViolationDocument]

    @classmethod
    def from_domain(cls, report: CapacityReport) -> Self:
        return cls(
            zero_grounded=report.zero_grounded,
            monotone=report.monotone,
            normalized=report.normalized,
            violations=[
                ViolationDocument(points=[format_point(p) for p in v.points], description=v.description)
                for v in report.violations
            ],
        )


class AttributeDocument(BaseModel):
    name: str
    levels: list[str] = Field(..., min_length=1, description="Level labels, worst first")


def _space(attributes: list[AttributeDocument]) -> AttributeSpace:
    return AttributeSpace(attributes=tuple(Attribute(name=a.name, levels=tuple(a.levels)) for a in attributes))


def _attributes(space: AttributeSpace) -> list[AttributeDocument]:
    return [AttributeDocument(name=a.name, levels=list(a.levels)) for a in space.attributes]


class TermDocument(BaseModel):
    scope: list[int]
    values: dict[str, str] = Field(..., description="Value per level combination of the scope")


class GaiModelDocument(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "attributes": [{"name": "x0", "levels": ["0", "1"]}, {"name": "x1", "levels": ["0", "1"]}],
                "terms": [{"scope": [0, 1], "values": {"0,0": "0", "0,1": "0", "1,0": "0", "1,1": "1"}}],
                "constant": "0",
            }
        }
    )

    attributes: list[AttributeDocument]
    terms: list[TermDocument] = Field(default_factory=list)
    constant: str = "0"

    @classmethod
    def from_domain(cls, model: GaiModel, digits: int | None = None) -> Self:
        return cls(
            attributes=_attributes(model.space),
            terms=[
                TermDocument(scope=list(t.scope), values=_render_map(sorted(t.values.items()), digits))
                for t in model.terms
            ],
            constant=render_rational(model.constant, digits),
        )

    def to_domain(self) -> GaiModel:
        return GaiModel(
            space=_space(self.attributes),
            terms=tuple(GaiTerm(scope=tuple(t.scope), values=_parse_map(t.values)) for t in self.terms),
            constant=to_fraction(self.constant),
        )


class TabulatedFunctionDocument(BaseModel):
    attributes: list[AttributeDocument]
    values: dict[str, str] = Field(..., description="Value per alternative, every alternative present")

    @classmethod
    def from_domain(cls, u: TabulatedFunction, digits: int | None = None) -> Self:
        return cls(attributes=_attributes(u.space), values=_render_map(u.items(), digits))

    def to_domain(self) -> TabulatedFunction:
        return TabulatedFunction.from_mapping(_space(self.attributes), _parse_map(self.values))


class VertexDocument(BaseModel):
    support: list[int]
    antichain: list[list[int]]
    mobius: dict[str, str]

    @classmethod
    def from_domain(cls, vertex: VertexCapacity) -> Self:
        return cls(
            support=list(vertex.support),
            antichain=[list(p) for p in vertex.antichain.points],
            mobius=_render_map(vertex.mobius.atoms(), None),
        )


class VertexCensusDocument(BaseModel):
    n: int
    k: int
    per_singleton: int
    per_pair: int
    total: str = Field(..., description="Exact total as a decimal integer string")

    @classmethod
    def from_domain(cls, census: VertexCensus) -> Self:
        return cls(
            n=census.n, k=census.k, per_singleton=census.per_singleton, per_pair=census.per_pair, total=str(census.total)
        )


class ConstraintCensusDocument(BaseModel):
    levels: list[int]
    variables: int
    full_monotonicity_constraints: int
    decomposed_monotonicity_constraints: int

    @classmethod
    def from_domain(cls, census: ConstraintCensus) -> Self:
        return cls(
            levels=list(census.levels),
            variables=census.variables,
            full_monotonicity_constraints=census.full_monotonicity_constraints,
            decomposed_monotonicity_constraints=census.decomposed_monotonicity_constraints,
        )


class SingletonTermDocument(BaseModel):
    i: int
    values: dict[str, str]


class PairTermDocument(BaseModel):
    i: int
    j: int
    values: dict[str, str]


class DecompositionDocument(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "n": 2,
                "k": 1,
                "levels": [1, 1],
                "singletons": [{"i": 0, "values": {"0": "0", "1": "0"}}, {"i": 1, "values": {"0": "0", "1": "0"}}],
                "pairs": [{"i": 0, "j": 1, "values": {"0,0": "0", "0,1": "1", "1,0": "1", "1,1": "1"}}],
            }
        }
    )

    n: int
    k: int
    levels: list[int] | None = None
    singletons: list[SingletonTermDocument]
    pairs: list[PairTermDocument]

    @classmethod
    def from_domain(cls, d: MonotoneGaiDecomposition, digits: int | None = None) -> Self:
        singletons = [
            SingletonTermDocument(i=i, values={str(a): render_rational(v, digits) for a, v in enumerate(table)})
            for i, table in sorted(d.singletons.items())
        ]
        pairs = []
        for (i, j), _ in sorted(d.pairs.items()):
            cells = itertools.product(range(d.levels[i] + 1), range(d.levels[j] + 1))
            pairs.append(
                PairTermDocument(
                    i=i,
                    j=j,
                    values={format_point(cell): render_rational(d.pair_value(i, j, *cell), digits) for cell in cells},
                )
            )
        return cls(n=d.n, k=d.k, levels=list(d.levels), singletons=singletons, pairs=pairs)

    def to_domain(self) -> MonotoneGaiDecomposition:
        levels = tuple(self.levels) if self.levels is not None else (self.k,) * self.n
        if len(levels) != self.n:
            raise DocumentError(f"Expected {self.n} level bounds, got {len(levels)}", {"levels": list(levels)})
        singletons = {}
        for term in self.singletons:
            _check_attributes((term.i,), self.n)
            parsed = _parse_map(term.values)
            singletons[term.i] = tuple(
                _cell(parsed, (a,), f"singleton {term.i}") for a in range(levels[term.i] + 1)
            )
        pairs = {}
        for term in self.pairs:
            _check_attributes((term.i, term.j), self.n)
            parsed = _parse_map(term.values)
            pairs[(term.i, term.j)] = tuple(
                _cell(parsed, cell, f"pair ({term.i}, {term.j})")
                for cell in itertools.product(range(levels[term.i] + 1), range(levels[term.j] + 1))
            )
        return MonotoneGaiDecomposition(n=self.n, k=self.k, levels=levels, singletons=singletons, pairs=pairs)


class WeightedVertexDocument(BaseModel):
    vertex: VertexDocument
    weight: str


class CombinationDocument(BaseModel):
    n: int
    k: int
    atoms: list[WeightedVertexDocument]

    @classmethod
    def from_domain(cls, combination: ConvexCombination, digits: int | None = None) -> Self:
        first = combination.atoms[0].vertex
        return cls(
            n=first.n,
            k=first.k,
            atoms=[
                WeightedVertexDocument(vertex=VertexDocument.from_domain(a.vertex), weight=render_rational(a.weight, digits))
                for a in combination.atoms
            ],
        )

    def to_domain(self) -> ConvexCombination:
        atoms = []
        for atom in self.atoms:
            record = atom.vertex
            antichain = Antichain(points=tuple(tuple(p) for p in record.antichain))
            vertex = polytope_service.vertex_from_antichain(antichain, tuple(record.support), self.n, self.k)
            claimed = {z: c for z, c in _parse_map(record.mobius).items() if c != 0}
            if claimed != vertex.mobius.coefficients:
                raise DocumentError(
                    "Vertex Möbius map does not match its antichain",
                    {"support": record.support, "antichain": record.antichain},
                )
            atoms.append(WeightedVertex(vertex=vertex, weight=to_fraction(atom.weight)))
        return ConvexCombination(atoms=tuple(atoms))


class ComparisonDocument(BaseModel):
    better: list[int]
    worse: list[int]


class AssignmentDocument(BaseModel):
    alt: list[int]
    category: int = Field(..., ge=0)


class PreferenceDatasetDocument(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "attributes": [{"name": "price", "levels": ["high", "low"]}, {"name": "speed", "levels": ["slow", "fast"]}],
                "strict": [{"better": [1, 1], "worse": [0, 0]}],
                "weak": [],
                "assignments": [{"alt": [1, 0], "category": 1}],
            }
        }
    )

    attributes: list[AttributeDocument]
    strict: list[ComparisonDocument] = Field(default_factory=list)
    weak: list[ComparisonDocument] = Field(default_factory=list)
    assignments: list[AssignmentDocument] = Field(default_factory=list)
    categories: int | None = None

    def to_domain(self) -> PreferenceDataset:
        return PreferenceDataset(
            space=_space(self.attributes),
            strict=tuple(PreferencePair(better=tuple(c.better), worse=tuple(c.worse)) for c in self.strict),
            weak=tuple(PreferencePair(better=tuple(c.better), worse=tuple(c.worse)) for c in self.weak),
            assignments=tuple(CategoryAssignment(alternative=tuple(a.alt), category=a.category) for a in self.assignments),
            categories=self.categories,
        )


class CertificateDocument(BaseModel):
    kind: str
    multipliers: dict[str, str]
    direction: dict[str, str]
    verified: bool

    @classmethod
    def from_domain(cls, certificate: LpCertificate, digits: int | None = None) -> Self:
        return cls(
            kind=certificate.kind,
            multipliers={k: render_rational(v, digits) for k, v in sorted(certificate.multipliers.items()) if v},
            direction={k: render_rational(v, digits) for k, v in sorted(certificate.direction.items()) if v},
            verified=certificate.verified,
        )


class ElicitationDocument(BaseModel):
    status: Literal["consistent", "infeasible_with_certificate", "relaxed"]
    margin: str | None = None
    thresholds: list[str] = Field(default_factory=list)
    violation: str | None = None
    model: DecompositionDocument | None = None
    certificate: CertificateDocument | None = None
    certificate_kind: str | None = None

    @classmethod
    def from_domain(cls, result: ElicitationResult, digits: int | None = None) -> Self:
        return cls(
            status=result.status,
            margin=None if result.margin is None else render_rational(result.margin, digits),
            thresholds=[render_rational(t, digits) for t in result.thresholds],
            violation=None if result.violation is None else render_rational(result.violation, digits),
            model=None if result.model is None else DecompositionDocument.from_domain(result.model, digits),
            certificate=None if result.certificate is None else CertificateDocument.from_domain(result.certificate, digits),
            certificate_kind=result.certificate_kind,
        )
