"""
Unit tests for the k-ary game service: transforms, capacity checks, additivity
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engine.errors import BudgetExceededError, CapacityViolationError, GridError, NotTwoAdditiveError
from engine.models.grid import KaryCapacity, KaryGame, MobiusMap
from engine.services.kary_service import chain_mobius, kary_service
from engine.services.polytope_service import polytope_service
from engine.utils.lattice import grid_points, support_of, uniform_bounds

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def games(draw, max_n: int = 3, max_k: int = 2):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_k))
    values = draw(st.lists(small_fractions, min_size=(k + 1) ** n, max_size=(k + 1) ** n))
    return KaryGame(n=n, k=k, values=tuple(values))


@st.composite
def two_additive_maps(draw):
    n = draw(st.integers(2, 3))
    k = draw(st.integers(1, 2))
    coefficients = {}
    for z in grid_points(uniform_bounds(n, k)):
        if 1 <= len(support_of(z)) <= 2:
            coefficients[z] = draw(small_fractions)
    return MobiusMap(n=n, k=k, coefficients=coefficients)


def test_zeta_of_zero_map_is_zero_game():
    """Test the empty Möbius map sums to the zero game"""
    game = kary_service.zeta(MobiusMap(n=2, k=2, coefficients={}))

    assert all(value == 0 for value in game.values)


def test_zeta_of_single_atom_is_unanimity():
    """Test a single unit atom gives the unanimity game of that point"""
    game = kary_service.zeta(MobiusMap(n=2, k=2, coefficients={(1, 2): Fraction(1)}))

    assert game.values == kary_service.unanimity((1, 2), k=2).values


def test_mobius_one_dimensional():
    """Test m(z) = v(z) - v(z - 1) on a chain"""
    game = KaryGame(n=1, k=2, values=(Fraction(0), Fraction(1, 2), Fraction(1)))

    m = kary_service.mobius(game)

    assert m.coefficients == {(1,): Fraction(1, 2), (2,): Fraction(1, 2)}


def test_mobius_of_two_coalition_vertex():
    """Test the +1, +1, -1 pattern for winning coalitions (1,2) and (2,1)"""
    values = {
        z: Fraction(int((z[0] >= 1 and z[1] >= 2) or (z[0] >= 2 and z[1] >= 1))) for z in grid_points((2, 2))
    }
    game = KaryGame.from_mapping(2, 2, values)

    m = kary_service.mobius(game)

    assert m.coefficients == {(1, 2): Fraction(1), (2, 1): Fraction(1), (2, 2): Fraction(-1)}


def test_mobius_of_unanimity_is_indicator():
    """Test the basis property of unanimity games"""
    for x in [(1, 0, 0), (2, 1, 0), (2, 2, 2)]:
        m = kary_service.mobius_bruteforce(kary_service.unanimity(x, k=2))

        assert m.coefficients == {x: Fraction(1)}


@settings(max_examples=60, deadline=None)
@given(games())
def test_mobius_zeta_round_trip(game):
    """Test zeta(mobius(v)) = v exactly"""
    assert kary_service.zeta(kary_service.mobius(game)).values == game.values


@settings(max_examples=60, deadline=None)
@given(games())
def test_mobius_matches_bruteforce(game):
    """Test the fast transform against generic poset inversion"""
    assert kary_service.mobius(game).coefficients == kary_service.mobius_bruteforce(game).coefficients


@settings(max_examples=40, deadline=None)
@given(two_additive_maps())
def test_zeta_mobius_round_trip_on_sparse_maps(m):
    """Test mobius(zeta(m)) = m exactly"""
    assert kary_service.mobius(kary_service.zeta(m)).coefficients == m.coefficients


def test_chain_mobius_values():
    """Test the chain Möbius function is 1, -1, then 0"""
    assert chain_mobius(2, 2) == 1
    assert chain_mobius(1, 2) == -1
    assert chain_mobius(0, 2) == 0
    assert chain_mobius(3, 1) == 0


def test_mobius_bruteforce_respects_budget(monkeypatch):
    """Test the oracle refuses grids above its budget"""
    monkeypatch.setattr(kary_service, "mobius_bruteforce_max_points", 8)
    game = KaryGame(n=2, k=2, values=(Fraction(0),) * 9)

    with pytest.raises(BudgetExceededError) as exc_info:
        kary_service.mobius_bruteforce(game)

    assert exc_info.value.required == 9
    assert exc_info.value.budget == 8


def test_basis_property(random_game_factory):
    """Test v = sum of m(x) u_x pointwise"""
    game = random_game_factory(2, 2)
    m = kary_service.mobius(game)
    recomposed = [m.coefficient(game.origin)] * len(game.values)
    for x, c in m.coefficients.items():
        if not any(x):
            continue
        unanimity = kary_service.unanimity(x, k=2)
        recomposed = [a + c * b for a, b in zip(recomposed, unanimity.values, strict=True)]

    assert tuple(recomposed) == game.values


def test_evaluate_mobius_matches_zeta(vertex_mixture_factory):
    """Test sparse evaluation agrees with the dense transform"""
    m = vertex_mixture_factory(3, 2).to_mobius()
    game = kary_service.zeta(m)

    assert all(kary_service.evaluate_mobius(m, z) == value for z, value in game.items())


def test_unanimity_rejects_origin():
    """Test the origin-centered unanimity game is refused"""
    with pytest.raises(GridError):
        kary_service.unanimity((0, 0), k=2)


def test_unanimity_top_is_one_only_at_top():
    """Test u_(k,...,k) equals 1 exactly at the top"""
    capacity = kary_service.unanimity((2, 2), k=2)

    assert [z for z, value in capacity.items() if value == 1] == [(2, 2)]


def test_unanimity_on_first_axis():
    """Test u_(1,0,0) depends only on the first coordinate"""
    capacity = kary_service.unanimity((1, 0, 0), k=1)

    assert all(value == (1 if z[0] >= 1 else 0) for z, value in capacity.items())


def test_check_capacity_accepts_capacity():
    """Test all flags are set and no violation is listed"""
    report = kary_service.check_capacity(kary_service.unanimity((1, 1), k=1))

    assert report.is_capacity
    assert report.violations == []


def test_check_capacity_reports_origin():
    """Test a nonzero origin is reported"""
    report = kary_service.check_capacity(KaryGame(n=1, k=1, values=(Fraction(1), Fraction(1))))

    assert not report.zero_grounded
    assert report.violations[0].points == ((0,),)


def test_check_capacity_reports_decreasing_pair():
    """Test v(1,0) = 1, v(1,1) = 0 is a monotonicity violation"""
    game = KaryGame(n=2, k=1, values=(Fraction(0), Fraction(0), Fraction(1), Fraction(0)))

    report = kary_service.check_capacity(game)

    assert not report.monotone
    assert ((1, 0), (1, 1)) in [v.points for v in report.violations]
    assert not report.is_capacity


def test_as_capacity_raises_with_witness():
    """Test promotion fails with the violating points in the details"""
    game = KaryGame(n=2, k=1, values=(Fraction(0), Fraction(1), Fraction(1), Fraction(1, 2)))

    with pytest.raises(CapacityViolationError) as exc_info:
        kary_service.as_capacity(game)

    assert exc_info.value.error_code == "CAPACITY_VIOLATION"
    assert exc_info.value.details["points"]


def test_capacity_model_rejects_non_monotone_values():
    """Test the capacity model validates monotonicity"""
    with pytest.raises(ValueError, match="monotone"):
        KaryCapacity(n=1, k=2, values=(Fraction(0), Fraction(2), Fraction(1)))


def test_game_model_rejects_wrong_shape():
    """Test a table with the wrong number of entries is refused"""
    with pytest.raises(ValueError, match="Expected 4 values"):
        KaryGame(n=2, k=1, values=(Fraction(0),) * 3)


def test_game_model_refuses_floats():
    """Test floats are not silently accepted as rationals"""
    with pytest.raises(ValueError):
        KaryGame(n=1, k=1, values=(0.0, 1.0))


def test_p_additivity_degree_of_additive_game():
    """Test a sum of one-dimensional tables has degree 1"""
    values = {z: Fraction(z[0] + 2 * z[1], 6) for z in grid_points((2, 2))}

    assert kary_service.p_additivity_degree(KaryGame.from_mapping(2, 2, values)) == 1


def test_p_additivity_degree_of_unanimity():
    """Test u_x with three active attributes has degree 3"""
    assert kary_service.p_additivity_degree(kary_service.unanimity((1, 1, 1), k=1)) == 3


def test_p_additivity_degree_of_zero_game():
    """Test the zero game is reported with degree 0"""
    assert kary_service.p_additivity_degree(KaryGame(n=2, k=1, values=(Fraction(0),) * 4)) == 0


def test_p_additivity_degree_of_vertex_mixture(mixture_capacity):
    """Test mixtures of pair-supported vertices are at most 2-additive"""
    for _ in range(5):
        assert kary_service.p_additivity_degree(mixture_capacity(3, 2)) <= 2


def test_support_of_zero_game():
    """Test the zero game has empty support"""
    assert kary_service.support(KaryGame(n=2, k=1, values=(Fraction(0),) * 4)) == frozenset()


def test_support_of_unanimity():
    """Test supp(u_(1,0,2)) = {0, 2}"""
    assert kary_service.support(kary_service.unanimity((1, 0, 2), k=2)) == frozenset({0, 2})


def test_support_of_sum_of_unanimities():
    """Test atoms at (1,0) and (0,1) give support {0, 1}"""
    m = MobiusMap(n=2, k=1, coefficients={(1, 0): Fraction(1, 2), (0, 1): Fraction(1, 2)})

    assert kary_service.support(kary_service.zeta(m)) == frozenset({0, 1})


def test_two_additive_determination(mixture_capacity):
    """Test a perturbation at a full-support point breaks 2-additivity"""
    capacity = mixture_capacity(3, 2)
    values = list(capacity.values)
    index = list(capacity.points()).index((1, 1, 1))
    values[index] += Fraction(1, 7)
    perturbed = KaryGame(n=3, k=2, values=tuple(values))

    assert kary_service.p_additivity_degree(perturbed) == 3
    with pytest.raises(NotTwoAdditiveError) as exc_info:
        kary_service.two_additive_mobius(perturbed)
    assert exc_info.value.details["point"] == "1,1,1"


def test_zero_one_iff_mobius_in_unit_set(mixture_capacity):
    """Test a 2-additive capacity is 0-1 valued iff its Möbius values lie in {-1, 0, 1}"""
    samples = [vertex.capacity for vertex in polytope_service.enumerate_vertices(2, 2)]
    samples += [mixture_capacity(2, 2, size) for size in (1, 2, 3) for _ in range(3)]
    for capacity in samples:
        coefficients = kary_service.mobius(capacity).coefficients.values()

        assert kary_service.is_zero_one_valued(capacity) == all(c in (-1, 0, 1) for c in coefficients)


@settings(max_examples=60, deadline=None)
@given(two_additive_maps())
def test_quadratic_check_matches_dense_check(m):
    """Test the O(n^2 k^2) check agrees with the full grid scan"""
    sparse = kary_service.check_two_additive_capacity(m)
    dense = kary_service.check_capacity(kary_service.zeta(m))

    assert sparse.zero_grounded == dense.zero_grounded
    assert sparse.normalized == dense.normalized
    assert sparse.monotone == dense.monotone


def test_quadratic_check_witness_is_a_real_violation():
    """Test the reported covering pair really decreases"""
    m = MobiusMap(
        n=2,
        k=1,
        coefficients={(1, 0): Fraction(1, 2), (0, 1): Fraction(1, 2), (1, 1): Fraction(-3, 4)},
    )
    report = kary_service.check_two_additive_capacity(m)
    game = kary_service.zeta(m)

    assert not report.monotone
    lower, upper = next(v.points for v in report.violations if len(v.points) == 2)
    assert game.value(upper) < game.value(lower)


def test_quadratic_check_orders_violations_like_dense_check():
    """Test origin, then decreasing pairs, then the top value are reported in that order"""
    m = MobiusMap(
        n=2,
        k=1,
        coefficients={(1, 0): Fraction(1, 2), (0, 1): Fraction(1, 2), (1, 1): Fraction(-3, 4)},
    )

    sparse = kary_service.check_two_additive_capacity(m)
    dense = kary_service.check_capacity(kary_service.zeta(m))

    assert [len(v.points) for v in sparse.violations] == [2, 2, 1]
    assert [len(v.points) for v in dense.violations] == [2, 2, 1]
    assert sparse.violations[-1].points == dense.violations[-1].points == ((1, 1),)


def test_two_additive_mobius_rejects_sparse_non_capacity():
    """Test sparse input that is 2-additive but not monotone is refused"""
    m = MobiusMap(n=2, k=1, coefficients={(1, 0): Fraction(2), (0, 1): Fraction(-1)})

    with pytest.raises(CapacityViolationError):
        kary_service.two_additive_mobius(m)


def test_minimal_steps_pick_smallest_increment():
    """Test the smallest increment and its position along each axis"""
    table = [
        [Fraction(0), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(-1), Fraction(-2)],
        [Fraction(0), Fraction(-1), Fraction(-1)],
    ]

    assert kary_service.minimal_steps(table, transpose=False) == [(Fraction(-2), 2), (Fraction(0), 0)]
    assert kary_service.minimal_steps(table, transpose=True) == [(Fraction(-1), 1), (Fraction(-1), 1)]


@pytest.mark.parametrize(("n", "k"), list(itertools.product([1, 2, 3], [1, 2])))
def test_mobius_origin_coefficient_equals_origin_value(random_game_factory, n, k):
    """Test m(0) = v(0)"""
    game = random_game_factory(n, k)

    assert kary_service.mobius(game).coefficient(game.origin) == game.value(game.origin)
