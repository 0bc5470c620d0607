from __future__ import annotations

import copy
import json

import pytest

from ptwist.runner import builtin_names, builtin_text, load_builtin, run
from ptwist.scenario import (
    RESERVED_TASKS,
    TASKS,
    ScenarioError,
    load_scenario,
    normalize,
    parse_field,
    parse_scenario,
)

BASE = {
    "algebras": {"A": {"kind": "truncated_polynomial", "n": 1, "degree": 2}},
    "modules": {"E": {"kind": "free", "algebra": "A", "degrees": [0]}},
}


def doc(**extra):
    d = copy.deepcopy(BASE)
    d.update(extra)
    return json.dumps(d)


def code_of(text, **kw):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text, **kw)
    return info.value.code


def test_minimal_scenario_has_no_tasks():
    sc = parse_scenario("{}")
    assert sc.tasks == [] and str(sc.field) == "fp:32003" and sc.seed == 0
    assert run(sc)["summary"] == {"all_pass": True, "fail": 0, "inconclusive": 0, "pass": 0, "total": 0}


def test_builds_named_objects():
    sc = parse_scenario(doc(morphisms={"id": {"kind": "identity", "module": "E"}}))
    assert sc.modules["E"].rank == 1
    assert sc.morphisms["id"].is_closed()


def test_normalize_is_idempotent():
    for name in builtin_names():
        spec = normalize(json.loads(builtin_text(name)))
        assert normalize(copy.deepcopy(spec)) == spec


def test_p1_scenario_lists_five_comparisons():
    sc = load_builtin("p1_square_equals_p_twist")
    assert [t["task"] for t in sc.tasks].count("find_quasi_iso") == 5


def test_builtin_catalogue():
    assert set(builtin_names()) >= {
        "classification",
        "p_twist_of_object",
        "p_twist_orthogonal",
        "degeneration",
        "p1_square_equals_p_twist",
        "k_theory",
        "full_faithfulness",
    }


def test_explicit_module_round_trip():
    text = doc(modules={"M": {
        "kind": "explicit", "algebra": "A",
        "generators": [{"name": "x", "degree": 0}, {"name": "y", "degree": -1}],
        "differential": [{"source": "x", "target": "y", "terms": [{"coeff": "1", "basis_name": "h"}]}],
    }})
    m = parse_scenario(text).modules["M"]
    assert m.names == ["x", "y"]


@pytest.mark.parametrize(
    "text, code",
    [
        ("{", "E_JSON"),
        ("[]", "E_SCHEMA"),
        ('{"schema_version": 2}', "E_SCHEMA"),
        ('{"tasks": [{"task": "nope"}]}', "E_UNKNOWN_TASK"),
        ('{"tasks": [{"task": "intertwining"}]}', "E_RESERVED_TASK"),
        ('{"field": "fp:4"}', "E_NOT_PRIME"),
        ('{"field": "reals"}', "E_FIELD"),
        ('{"tasks": [{"task": "classify", "args": {"module": "Q"}}]}', "E_UNRESOLVED"),
        ('{"tasks": [{"task": "classify"}]}', "E_SCHEMA"),
        ('{"modules": {"M": {"kind": "shift", "of": "M", "by": 1}}}', "E_CYCLE"),
        ('{"modules": {"M": {"kind": "blob"}}}', "E_SCHEMA"),
    ],
)
def test_error_codes(text, code):
    assert code_of(text) == code


def test_wrong_degree_differential_entry():
    text = doc(modules={"M": {
        "kind": "explicit", "algebra": "A",
        "generators": [{"name": "x", "degree": 0}, {"name": "y", "degree": 0}],
        "differential": [{"source": "x", "target": "y", "terms": [{"coeff": "1", "basis_name": "h"}]}],
    }})
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    assert info.value.code == "E_DIFF_DEGREE"
    assert info.value.location == "modules.M.differential[0]"
    assert info.value.category == "validation"


def test_non_square_zero_differential():
    text = doc(modules={"M": {
        "kind": "explicit", "algebra": "A",
        "generators": [{"name": "x", "degree": 0}, {"name": "y", "degree": 1}, {"name": "z", "degree": 2}],
        "differential": [
            {"source": "x", "target": "y", "terms": [{"coeff": 1, "basis_name": "1"}]},
            {"source": "y", "target": "z", "terms": [{"coeff": 1, "basis_name": "1"}]},
        ],
    }})
    assert code_of(text) == "E_SQUARE_ZERO"


def test_parse_field_and_override():
    assert str(parse_field("q")) == "q"
    sc = parse_scenario(doc(), field="q", seed=9)
    assert str(sc.field) == "q" and sc.seed == 9
    assert code_of(doc(), field="fp:9") == "E_NOT_PRIME"


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ScenarioError) as info:
        load_scenario(tmp_path / "absent.json")
    assert info.value.code == "E_IO" and info.value.category == "parse"


def test_error_json_shape():
    try:
        parse_scenario('{"tasks": [{"task": "nope"}]}')
    except ScenarioError as exc:
        assert exc.to_json() == {
            "code": "E_UNKNOWN_TASK",
            "message": "unknown task 'nope'",
            "location": "tasks[0]",
            "category": "validation",
        }


def test_task_tables_are_disjoint():
    assert not set(TASKS) & set(RESERVED_TASKS)


def test_expectation_mismatch_is_a_failure():
    text = doc(tasks=[{"task": "cohomology_dims", "args": {"module": "E"}, "expect": {"dims": {"0": 1}}}])
    rep = run(parse_scenario(text))
    (rec,) = rep["tasks"]
    assert rec["verdict"] == "fail" and rep["summary"]["fail"] == 1
    text = doc(tasks=[{"task": "cohomology_dims", "args": {"module": "E"}, "expect": {"dims": {"0": 1, "2": 1}}}])
    assert run(parse_scenario(text))["summary"]["all_pass"]


def test_random_modules_depend_on_scenario_seed():
    text = doc(modules={"R": {"kind": "random", "algebra": "A", "generators": 4, "seed": 1}})
    a, b = parse_scenario(text, seed=0).modules["R"], parse_scenario(text, seed=0).modules["R"]
    c = parse_scenario(text, seed=1).modules["R"]
    assert a.generators == b.generators and (a.differential == b.differential).all()
    assert a.generators != c.generators or not (a.differential == c.differential).all()
