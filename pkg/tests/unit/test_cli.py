"""
Unit tests for the command line front end
"""

import itertools
import json
from fractions import Fraction

from engine.models.documents import ConstraintCensusDocument
from engine.services.decompose_service import decompose_service

DISJUNCTION = {"n": 2, "k": 1, "values": {"0,0": "0", "0,1": "1", "1,0": "1", "1,1": "1"}}


def _game(n: int, k: int, fn) -> dict:
    values = {}
    for z in itertools.product(range(k + 1), repeat=n):
        values[",".join(map(str, z))] = str(Fraction(fn(z)))
    return {"n": n, "k": k, "values": values}


def _attributes(*bounds: int) -> list[dict]:
    return [{"name": f"x{i}", "levels": [str(level) for level in range(m + 1)]} for i, m in enumerate(bounds)]


def _canonical(document: dict) -> str:
    return json.dumps(document, indent=2) + "\n"


def test_census_uniform(cli_runner):
    """Test census --n 4 --k 4 prints 170, 2000 and 256"""
    result = cli_runner("census", "--n", "4", "--k", "4")

    assert result.code == 0
    payload = json.loads(result.stdout)
    assert payload["levels"] == [4, 4, 4, 4]
    assert payload["variables"] == 170
    assert payload["full_monotonicity_constraints"] == 2000
    assert payload["decomposed_monotonicity_constraints"] == 256


def test_census_per_attribute_levels(cli_runner):
    """Test census --m matches the library call"""
    result = cli_runner("census", "--m", "4,4,3")

    expected = ConstraintCensusDocument.from_domain(decompose_service.constraint_census([4, 4, 3]))
    assert json.loads(result.stdout) == expected.model_dump(mode="json")


def test_vertices_count(cli_runner):
    """Test the vertex census for n = 3, k = 2 is 48"""
    result = cli_runner("vertices", "count", "--n", "3", "--k", "2")

    payload = json.loads(result.stdout)
    assert payload["total"] == "48"
    assert payload["per_pair"] == 18


def test_vertices_enum_streams_json_lines(cli_runner):
    """Test vertices enum writes one JSON document per vertex"""
    result = cli_runner("vertices", "enum", "--n", "2", "--k", "1")

    lines = [json.loads(line) for line in result.stdout.splitlines()]
    assert result.code == 0
    assert len(lines) == 4
    assert lines[0] == {"support": [0], "antichain": [[1]], "mobius": {"1,0": "1"}}
    assert lines[-1]["mobius"] == {"0,1": "1", "1,0": "1", "1,1": "-1"}


def test_antichains(cli_runner):
    """Test antichains --k 2 lists 18 antichains"""
    payload = json.loads(cli_runner("antichains", "--k", "2").stdout)

    assert payload["count"] == 18
    assert payload["antichains"][0] == [[0, 1]]


def test_mobius_then_zeta_is_byte_identical(cli_runner):
    """Test zeta(mobius(v)) reproduces the game document byte for byte"""
    game = _game(2, 2, lambda z: Fraction(z[0] + z[1] * z[0] + z[1], 8))

    mobius = cli_runner("mobius", stdin=json.dumps(game))
    back = cli_runner("zeta", stdin=mobius.stdout)

    assert json.loads(mobius.stdout)["mobius"] == {
        "0,1": "1/8",
        "1,0": "1/8",
        "1,1": "1/8",
        "1,2": "1/8",
        "2,1": "1/8",
        "2,2": "1/8",
        "0,2": "1/8",
        "2,0": "1/8",
    }
    assert back.stdout == _canonical(game)


def test_decimal_rendering(cli_runner):
    """Test --decimal marks approximate values with ~"""
    game = {"n": 1, "k": 2, "values": {"0": "0", "1": "1/3", "2": "1"}}

    result = cli_runner("mobius", "--decimal", "4", stdin=json.dumps(game))

    assert json.loads(result.stdout)["mobius"] == {"1": "~0.3333", "2": "~0.6667"}


def test_check_reports_violations(cli_runner):
    """Test check exits 0 and reports a monotonicity failure"""
    game = {"n": 1, "k": 2, "values": {"0": "0", "1": "1", "2": "1/2"}}

    result = cli_runner("check", stdin=json.dumps(game))

    payload = json.loads(result.stdout)
    assert result.code == 0
    assert payload["monotone"] is False
    assert payload["normalized"] is False
    assert payload["violations"]


def test_padd_of_three_way_unanimity(cli_runner):
    """Test padd reads Möbius documents"""
    result = cli_runner("padd", stdin=json.dumps({"n": 3, "k": 1, "mobius": {"1,1,1": "1"}}))

    assert json.loads(result.stdout) == {"degree": 3, "degenerate": False, "support": [0, 1, 2]}


def test_embed_tabulated_utility(cli_runner):
    """Test embed fills the missing level by clamping and reports the degree"""
    document = {
        "attributes": _attributes(1, 2),
        "values": {f"{a},{b}": str(Fraction(a + b, 3)) for a in range(2) for b in range(3)},
    }

    result = cli_runner("embed", "--fill", "clamp", stdin=json.dumps(document))

    payload = json.loads(result.stdout)
    assert payload["k"] == 2
    assert payload["values"]["2,0"] == "1/3"
    assert payload["p_additivity_degree"] == 1


def test_canonical_decomposition(cli_runner, three_term_utility):
    """Test canonical with an explicit order"""
    document = {
        "attributes": _attributes(2, 2, 2),
        "values": {",".join(map(str, x)): str(value) for x, value in three_term_utility.items()},
    }

    result = cli_runner("canonical", "--order", "1;0,2;0,1", stdin=json.dumps(document))

    terms = json.loads(result.stdout)["terms"]
    assert [t["scope"] for t in terms] == [[1], [0, 2], [0, 1]]
    assert terms[2]["values"]["1,2"] == "-1"


def test_delta_decompose_rejects_non_additive(cli_runner):
    """Test a 3-way product is refused for p = 2 with exit code 1"""
    document = {
        "attributes": _attributes(1, 1, 1),
        "values": {f"{a},{b},{c}": str(a * b * c) for a in range(2) for b in range(2) for c in range(2)},
    }

    result = cli_runner("delta-decompose", "--p", "2", stdin=json.dumps(document))

    assert result.code == 1
    assert result.error["error_code"] == "NOT_P_ADDITIVE"


def test_decompose_then_recompose(cli_runner):
    """Test recompose(decompose(v)) prints the original game"""
    decomposed = cli_runner("decompose", "--method", "direct", stdin=json.dumps(DISJUNCTION))
    recomposed = cli_runner("recompose", stdin=decomposed.stdout)

    pairs = json.loads(decomposed.stdout)["pairs"]
    assert pairs == [{"i": 0, "j": 1, "values": {"0,0": "0", "0,1": "1", "1,0": "1", "1,1": "1"}}]
    assert recomposed.stdout == _canonical(DISJUNCTION)


def test_combination_then_recompose(cli_runner):
    """Test a convex combination document recomposes to the game"""
    combination = cli_runner("decompose", "--combination", stdin=json.dumps(DISJUNCTION))
    recomposed = cli_runner("recompose", stdin=combination.stdout)

    atoms = json.loads(combination.stdout)["atoms"]
    assert [atom["weight"] for atom in atoms] == ["1"]
    assert recomposed.stdout == _canonical(DISJUNCTION)


def test_decompose_is_deterministic(cli_runner):
    """Test two runs print identical bytes"""
    game = _game(2, 2, lambda z: Fraction(max(z), 2))

    first = cli_runner("decompose", "--objective", "sparse", stdin=json.dumps(game))
    second = cli_runner("decompose", "--objective", "sparse", stdin=json.dumps(game))

    assert first.code == 0
    assert first.stdout == second.stdout


def test_decompose_rejects_three_way_interaction(cli_runner):
    """Test the error payload carries the offending atom"""
    game = _game(3, 1, lambda z: int(all(z)))

    result = cli_runner("decompose", stdin=json.dumps(game))

    assert result.code == 1
    assert result.stdout == ""
    assert result.error["error_code"] == "NOT_TWO_ADDITIVE"
    assert result.error["details"]["point"] == "1,1,1"
    assert result.error["success"] is False


def test_extreme(cli_runner):
    """Test the 'or' capacity is a vertex"""
    result = cli_runner("extreme", stdin=json.dumps(DISJUNCTION))

    assert json.loads(result.stdout) == {"extreme": True}


def test_elicit_document(cli_runner):
    """Test elicit separates the all-best from the all-worst alternative"""
    dataset = {"attributes": _attributes(1, 1), "strict": [{"better": [1, 1], "worse": [0, 0]}]}

    payload = json.loads(cli_runner("elicit", stdin=json.dumps(dataset)).stdout)

    assert payload["status"] == "consistent"
    assert payload["margin"] == "1"
    assert payload["model"]["levels"] == [1, 1]


def test_lp_dump(cli_runner):
    """Test lp-dump prints the decomposition program in LP format"""
    result = cli_runner("lp-dump", stdin=json.dumps(DISJUNCTION))

    lines = result.stdout.splitlines()
    assert lines[0] == "\\ monotone_decomposition"
    assert " mono_s0_0: s0_1 >= 0" in lines
    assert " eq_1_1: s0_1 + s1_1 + p0_1_1_1 = 1" in lines
    assert lines[-1] == "End"


def test_output_file(cli_runner, tmp_path):
    """Test --output writes the document to a file"""
    target = tmp_path / "census.json"

    result = cli_runner("census", "--n", "2", "--k", "1", "-o", str(target))

    assert result.stdout == ""
    assert json.loads(target.read_text(encoding="utf-8"))["variables"] == 8


def test_input_file(cli_runner, tmp_path):
    """Test --input reads the document from a file"""
    source = tmp_path / "game.json"
    source.write_text(json.dumps(DISJUNCTION), encoding="utf-8")

    result = cli_runner("mobius", "-i", str(source))

    assert json.loads(result.stdout)["mobius"] == {"0,1": "1", "1,0": "1", "1,1": "-1"}


def test_malformed_json_reports_position(cli_runner):
    """Test malformed JSON gives MALFORMED_DOCUMENT with line and column"""
    result = cli_runner("mobius", stdin='{"n": 2,\n  "k": }')

    assert result.code == 1
    error = result.error
    assert error["error_code"] == "MALFORMED_DOCUMENT"
    assert error["details"]["line"] == 2
    assert error["details"]["column"] == 8
    assert error["details"]["path"] == "<stdin>"


def test_missing_input_file(cli_runner, tmp_path):
    """Test an unreadable input path is reported"""
    result = cli_runner("mobius", "-i", str(tmp_path / "missing.json"))

    assert result.code == 1
    assert result.error["error_code"] == "MALFORMED_DOCUMENT"


def test_invalid_document(cli_runner):
    """Test a schema violation gives INVALID_DOCUMENT"""
    result = cli_runner("mobius", stdin=json.dumps({"n": 2, "values": {}}))

    assert result.code == 1
    assert result.error["error_code"] == "INVALID_DOCUMENT"


def test_incomplete_value_table(cli_runner):
    """Test a game missing grid points is refused"""
    result = cli_runner("mobius", stdin=json.dumps({"n": 1, "k": 1, "values": {"0": "0"}}))

    assert result.code == 1
    assert "missing 1" in result.error["message"]


def test_usage_errors_exit_2(cli_runner):
    """Test argparse usage errors return exit code 2"""
    assert cli_runner("census", "--n", "many").code == 2
    assert cli_runner("no-such-command").code == 2
    assert cli_runner().code == 2


def test_recompose_reports_missing_pair_cell(cli_runner):
    """Test a pair table without one of its cells is a structured error"""
    decomposed = json.loads(cli_runner("decompose", "--method", "direct", stdin=json.dumps(DISJUNCTION)).stdout)
    del decomposed["pairs"][0]["values"]["1,1"]

    result = cli_runner("recompose", stdin=json.dumps(decomposed))

    assert result.code == 1
    assert result.error["error_code"] == "MALFORMED_DOCUMENT"
    assert result.error["details"]["cell"] == "1,1"


def test_recompose_rejects_vertex_with_wrong_mobius(cli_runner):
    """Test a combination atom whose Möbius map contradicts its antichain is refused"""
    combination = json.loads(cli_runner("decompose", "--combination", stdin=json.dumps(DISJUNCTION)).stdout)
    combination["atoms"][0]["vertex"]["mobius"] = {"1,1": "1"}

    result = cli_runner("recompose", stdin=json.dumps(combination))

    assert result.code == 1
    assert result.error["error_code"] == "MALFORMED_DOCUMENT"


def test_decompose_cold_start_matches_capacity(cli_runner):
    """Test --cold-start solves the program and recomposes to the input"""
    decomposed = cli_runner("decompose", "--cold-start", stdin=json.dumps(DISJUNCTION))
    recomposed = cli_runner("recompose", stdin=decomposed.stdout)

    assert decomposed.code == 0
    assert recomposed.stdout == _canonical(DISJUNCTION)


def test_usage_errors_go_to_given_stream(cli_runner):
    """Test argparse messages are written to the stream passed to run"""
    result = cli_runner("census", "--n", "many")

    assert result.code == 2
    assert "invalid int value" in result.stderr
