"""Execute scenario tasks and assemble deterministic JSON reports."""

from __future__ import annotations

import json
import time
from importlib import resources

import numpy as np

from . import __version__, degen, dgmod, equivlab, homext, twistops
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


# -- JSON helpers ------------------------------------------------------------


def dims_json(d: dict[int, int]) -> dict[str, int]:
    return {str(k): int(v) for k, v in sorted(d.items())}


def matrix_json(f: dgmod.Morphism) -> dict:
    fs = f.field
    entries = []
    for i, j, c in zip(*np.nonzero(f.matrix)):
        entries.append([f.target.names[i], f.source.names[j], f.algebra.basis_names[c], fs.to_json(f.matrix[i, j, c])])
    return {"degree": f.degree, "shape": [f.target.rank, f.source.rank], "entries": entries}


def module_json(m: dgmod.SemifreeModule) -> dict:
    return {
        "rank": m.rank,
        "generator_degrees": [int(x) for x in m.degree_array],
        "cohomology_dims": dims_json(homext.cohomology_dims(m)),
    }


def _canon(x):
    """Round-trip through JSON so expectations compare like-for-like."""
    return json.loads(json.dumps(x, sort_keys=True))


# -- tasks ---------------------------------------------------------------------


def _h_arg(sc: Scenario, args: dict, e: dgmod.SemifreeModule):
    if "h" not in args:
        return None
    h = sc.morphisms[args["h"]]
    if h.degree == 0 and h.source is not e:
        # multiplication maps come as E[-2] -> E; reinterpret as degree 2
        h = dgmod.Morphism(e, e, 2, h.matrix.copy())
    return h


def _task_classify(sc, args):
    res = homext.classify(sc.modules[args["module"]])
    data = {"verdict": res.verdict, "verdicts": list(res.verdicts), "dims": dims_json(res.dims),
            "n": res.n, "d": res.d, "reason": res.reason}
    if res.witness is not None:
        data["witness"] = matrix_json(res.witness)
    return data, PASS, None


def _task_ext_dims(sc, args):
    d = homext.ext_dims(sc.modules[args["source"]], sc.modules[args["target"]])
    return {"dims": dims_json(d)}, PASS, None


def _task_cohomology_dims(sc, args):
    return {"dims": dims_json(homext.cohomology_dims(sc.modules[args["module"]]))}, PASS, None


def _twist(kind):
    def run(sc, args):
        e, f = sc.modules[args["e"]], sc.modules[args["f"]]
        if kind == "spherical_twist":
            out = twistops.spherical_twist(e, f)
        elif kind == "double_twist":
            out = twistops.double_twist(e, f)
        else:
            out = twistops.p_twist(sc.plan_for(e), f)
        return module_json(out), PASS, out

    return run


def _task_minimal_model(sc, args):
    res = equivlab.minimal_model(sc.modules[args["module"]])
    data = {
        "generator_degrees": res.generator_degrees,
        "zero_differential": not bool(np.any(res.minimal.differential != 0)),
        "reduced": res.is_reduced(),
        "witnesses_verified": True,
        "eliminations": [[s.pivot_source, s.pivot_target, s.scalar] for s in res.log],
    }
    return data, PASS, res.minimal


def _task_find_quasi_iso(sc, args):
    m, n = sc.modules[args["source"]], sc.modules[args["target"]]
    seed = int(args.get("seed", sc.seed))
    attempts = int(args.get("attempts", 64))
    res = equivlab.find_quasi_iso(m, n, seed=seed, attempts=attempts)
    if isinstance(res, equivlab.NotFound):
        data = {"found": False, "proven_inequivalent": res.proven, "reason": res.reason,
                "seed": seed, "attempts": attempts}
        return data, (FAIL if res.proven else INCONCLUSIVE), None
    cert = equivlab.is_quasi_iso(res)
    data = {"found": True, "verified": cert.verdict, "seed": seed, "attempts": attempts,
            "cohomology_dims": dims_json(cert.source_dims), "witness": matrix_json(res)}
    return data, PASS if cert.verdict else FAIL, None


def _task_euler_pairing(sc, args):
    v = equivlab.euler_pairing(sc.modules[args["source"]], sc.modules[args["target"]])
    return {"value": v}, PASS, None


def _task_ambient_profile(sc, args):
    e = sc.modules[args["module"]]
    ring = homext.ext_ring(e)
    h = _h_arg(sc, args, e)
    if h is None:
        h = homext.classify(e, ring).witness
        if h is None:
            raise dgmod.ModuleError("no degree-2 witness; pass 'h'")
    model = degen.ambient_object(e, h)
    profile = degen.ambient_ext_profile(model)
    oracle = degen.les_oracle(ring, ring.coordinates(h))
    data = {"profile": dims_json(profile), "oracle": dims_json(oracle), "agree": profile == oracle}
    return data, PASS if profile == oracle else FAIL, model.obj


def _task_spherical_after_pushforward(sc, args):
    e = sc.modules[args["module"]]
    rep = degen.spherical_after_pushforward(e, _h_arg(sc, args, e))
    data = {"spherical": rep.spherical, "n": rep.n, "profile": dims_json(rep.profile),
            "oracle": dims_json(rep.oracle), "agree": rep.agree}
    return data, PASS if rep.agree else FAIL, None


TASK_FUNCS = {
    "classify": _task_classify,
    "ext_dims": _task_ext_dims,
    "cohomology_dims": _task_cohomology_dims,
    "spherical_twist": _twist("spherical_twist"),
    "p_twist": _twist("p_twist"),
    "double_twist": _twist("double_twist"),
    "minimal_model": _task_minimal_model,
    "find_quasi_iso": _task_find_quasi_iso,
    "euler_pairing": _task_euler_pairing,
    "ambient_profile": _task_ambient_profile,
    "spherical_after_pushforward": _task_spherical_after_pushforward,
}


def run_task(sc: Scenario, task: dict, *, timings: bool = False) -> dict:
    t0 = time.perf_counter()
    rec = {"task": task["task"], "inputs": task["args"]}
    if "citation" in task:
        rec["citation"] = task["citation"]
    try:
        data, verdict, produced = TASK_FUNCS[task["task"]](sc, task["args"])
    except (dgmod.ModuleError, ValueError, ArithmeticError, KeyError) as exc:
        data, verdict, produced = {"error": f"{type(exc).__name__}: {exc}"}, FAIL, None
    if produced is not None and "as" in task:
        sc.modules[task["as"]] = produced
        rec["as"] = task["as"]
    expect = task.get("expect")
    if expect is not None:
        mism = {k: {"expected": v, "actual": _canon(data.get(k))} for k, v in expect.items() if _canon(data.get(k)) != _canon(v)}
        rec["expect"] = expect
        if mism:
            verdict = FAIL
            rec["mismatches"] = mism
    rec["verdict"] = verdict
    rec["data"] = _canon(data)
    if timings:
        rec["wall_time_s"] = round(time.perf_counter() - t0, 6)
    return rec


def summarize(records: list[dict]) -> dict:
    out = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
    for r in records:
        out[r["verdict"]] += 1
    out["total"] = len(records)
    out["all_pass"] = out[PASS] == len(records)
    return out


def run(sc: Scenario, *, timings: bool = False) -> dict:
    """Run every task in order and return the report."""
    t0 = time.perf_counter()
    records = [run_task(sc, t, timings=timings) for t in sc.tasks]
    rep = {
        "tool": "ptwist",
        "version": __version__,
        "scenario": sc.name,
        "citation": sc.spec["citation"],
        "field": str(sc.field),
        "seed": sc.seed,
        "tasks": records,
        "summary": summarize(records),
    }
    if timings:
        rep["wall_time_s"] = round(time.perf_counter() - t0, 6)
    return rep


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# -- built-in scenarios ----------------------------------------------------------


def builtin_names() -> list[str]:
    pkg = resources.files("ptwist") / "scenarios"
    return sorted(p.name[:-5] for p in pkg.iterdir() if p.name.endswith(".json"))


def builtin_text(name: str) -> bytes:
    return (resources.files("ptwist") / "scenarios" / f"{name}.json").read_bytes()


def load_builtin(name: str, **kw) -> Scenario:
    if name not in builtin_names():
        raise ScenarioError("E_IO", f"no built-in scenario {name!r}", name)
    return parse_scenario(builtin_text(name), **kw)


def run_suite(*, seed: int | None = None, field=None, timings: bool = False) -> dict:
    reports = []
    for name in builtin_names():
        sc = load_builtin(name, seed=seed, field=field)
        reports.append(run(sc, timings=timings))
    total = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0, "total": 0}
    for r in reports:
        for k in total:
            total[k] += r["summary"][k]
    total["all_pass"] = total[PASS] == total["total"]
    total["scenarios"] = len(reports)
    return {"tool": "ptwist", "version": __version__, "seed": seed, "scenarios": reports, "summary": total}


__all__ = ["run", "run_task", "run_suite", "dumps", "load_scenario", "builtin_names", "load_builtin"]
