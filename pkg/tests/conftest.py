"""
Pytest configuration and shared fixtures for testing.
"""

import io
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import pytest

# Add src/kary_gai to Python path
# This allows importing the engine package without installing it
engine_path = Path(__file__).parent.parent / "src" / "kary_gai"
if str(engine_path) not in sys.path:
    sys.path.insert(0, str(engine_path))


@dataclass
class CliResult:
    code: int
    stdout: str
    stderr: str

    @property
    def error(self) -> dict:
        """The JSON error payload, always the last stderr line"""
        import json

        return json.loads(self.stderr.strip().splitlines()[-1])


@pytest.fixture
def rng():
    """Seeded random generator, identical across runs."""
    return random.Random(20240601)


@pytest.fixture
def random_game_factory(rng):
    """Build random k-ary games with small exact rational values."""
    from engine.models.grid import KaryGame

    def build(n: int, k: int) -> KaryGame:
        values = tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range((k + 1) ** n))
        return KaryGame(n=n, k=k, values=values)

    return build


@pytest.fixture
def vertex_mixture_factory(rng):
    """Random convex combinations of vertices of the 2-additive polytope.

    Vertices are drawn directly from antichains and attribute pairs, so the
    factory also works on grids far too large to enumerate.
    """
    from engine.models.decomposition import ConvexCombination, WeightedVertex
    from engine.models.polytope import Antichain
    from engine.services.polytope_service import polytope_service

    def draw(n: int, k: int):
        if n == 1 or rng.random() < 0.25:
            i = rng.randrange(n)
            return polytope_service.vertex_from_antichain(Antichain(points=((rng.randint(1, k),),)), (i,), n, k)
        antichains = [a for a in polytope_service.enumerate_antichains(k) if not a.on_one_axis()]
        pair = tuple(sorted(rng.sample(range(n), 2)))
        return polytope_service.vertex_from_antichain(rng.choice(antichains), pair, n, k)

    def build(n: int, k: int, size: int = 3) -> ConvexCombination:
        vertices = {}
        while len(vertices) < size:
            vertex = draw(n, k)
            vertices[(vertex.support, vertex.antichain.points)] = vertex
        raw = [rng.randint(1, 9) for _ in vertices]
        total = sum(raw)
        atoms = tuple(
            WeightedVertex(vertex=vertex, weight=Fraction(weight, total))
            for vertex, weight in zip(vertices.values(), raw, strict=True)
        )
        return ConvexCombination(atoms=atoms)

    return build


@pytest.fixture
def mixture_capacity(vertex_mixture_factory):
    """Dense capacity of a random vertex mixture."""
    from engine.services.kary_service import kary_service

    def build(n: int, k: int, size: int = 3):
        combination = vertex_mixture_factory(n, k, size)
        return kary_service.as_capacity(kary_service.zeta(combination.to_mobius()))

    return build


@pytest.fixture
def three_term_utility():
    """U(x) = x1 + x0 * x2 + max(x0, x1) tabulated on {0,1,2}^3."""
    from engine.models.gai import AttributeSpace, TabulatedFunction

    space = AttributeSpace.from_level_bounds((2, 2, 2))
    return TabulatedFunction.from_callable(space, lambda x: x[1] + x[0] * x[2] + max(x[0], x[1]))


@pytest.fixture
def cli_runner():
    """Invoke the command line in-process and capture its streams."""
    from engine.cli import run

    def invoke(*argv: str, stdin: str = "") -> CliResult:
        out, err = io.StringIO(), io.StringIO()
        code = run(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
        return CliResult(code=code, stdout=out.getvalue(), stderr=err.getvalue())

    return invoke
