"""
Command-line front end

    python cli.py enumerate --up-to-symmetry
    python cli.py bullet --heights '{"000": "1", "001": 0, ...}'
    python cli.py vinberg --lattice even --max-height 6
    python cli.py verify-all

Reports are JSON on stdout (or --output), always carrying the seed. Exit
codes: 0 success, 1 invalid input, 2 bound exceeded, inconclusive or a failed
verification. Errors go to stderr as JSON.
"""
import argparse
import json
import random
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from cell_classifier import (
    CoefficientAssignment,
    cell_type,
    classify_report,
    discriminant_hyperdeterminant,
    has_singular_point,
    hyperdeterminant_222,
    singular_coefficients,
)
from config import (
    ODD1_WINDOW,
    ODD2_SEARCH_BOUND,
    ORACLE_SAMPLES,
    PROPERTY_SAMPLES,
    SEED,
    VINBERG_MAX_HEIGHT,
    WORKER_COUNT,
)
from corner_cuts import apex_drops, detect, modify, modify_heights
from cube_geometry import SYM_Q_TABLE, point_key
from errors import CubeKsbaError, InvalidInput
from exact_kernel import format_rational
from intersection_theory import invariants_report
from logger_config import setup_logger, timed
from schemas import SCHEMAS
from strata_atlas import boundary_atlas, crosscheck_even, crosscheck_odd1, maximal_components
from subdivisions import (
    TRIVIAL,
    HeightFunction,
    dimension_census,
    enumerate_all,
    from_heights,
    is_regular,
    orbits,
    stratum_dimension,
    validate,
)
from torus_cohomology import TRIVIAL_BY_REDUCTION, h1_torus, reduce_and_verdict
from validators import (
    validate_coefficients_payload,
    validate_heights_payload,
    validate_subdivision_payload,
    validate_vinberg_request,
)
from vinberg import (
    LATTICES,
    classify_subdiagrams,
    coxeter_diagram,
    diagram_from_gram,
    finite_volume_check,
    named_lattice,
    norm_vector_search,
    odd1_classification,
    odd1_diagram,
    odd1_gram,
    odd1_root,
    roots_at_height,
    vinberg_run,
)

logger = setup_logger("cli")

EXPECTED_CENSUS = {0: 74, 1: 152, 2: 100, 3: 22, 4: 1}
EXPECTED_COVERS = ["1", "2", "4", "4"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    output: Optional[str] = None
    max_height: int = VINBERG_MAX_HEIGHT
    window: int = ODD1_WINDOW
    search_bound: int = ODD2_SEARCH_BOUND
    samples: int = PROPERTY_SAMPLES
    oracle_samples: int = ORACLE_SAMPLES
    seed: int = SEED
    workers: int = WORKER_COUNT

    def __post_init__(self):
        for name in ("max_height", "window", "search_bound", "samples", "oracle_samples", "workers"):
            if getattr(self, name) < 1:
                raise InvalidInput(f"{name} must be positive", payload={"field": name})


class _Parser(argparse.ArgumentParser):
    """Usage errors are input validation errors"""

    def error(self, message):
        raise InvalidInput(message)


def load_document(source: str) -> Any:
    """Inline JSON or a path to a JSON file"""
    text = source
    if not source.lstrip().startswith(("{", "[")):
        path = Path(source)
        if not path.is_file():
            raise InvalidInput(f"No such file: {source}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"Invalid JSON: {e.msg}", payload={"line": e.lineno}) from e


def parallel_map(fn: Callable, items: Sequence, workers: int) -> List:
    """Order-preserving map over a process pool"""
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _refutation_json(refutation) -> Optional[dict]:
    if refutation is None:
        return None
    return {
        "strict": [format_rational(x) for x in refutation.strict_multipliers],
        "inequalities": [format_rational(x) for x in refutation.inequality_multipliers],
        "equalities": [format_rational(x) for x in refutation.equality_multipliers],
        "verified": refutation.verify(),
    }


def _write(path: str, text: str):
    Path(path).write_text(text + "\n")
    logger.info(f"Wrote {path}")


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

Outcome = Tuple[dict, int]


def cmd_enumerate(args, config: RunConfig) -> Outcome:
    subs = enumerate_all()
    if args.triangulations_only:
        subs = [s for s in subs if s.is_triangulation]
    if args.corner_cut_free:
        subs = [s for s in subs if not detect(s)]
    doc = {"count": len(subs), "census": dimension_census(subs)}
    if args.up_to_symmetry:
        doc["orbits"] = [
            {
                **o.representative.to_json(),
                "orbit_size": o.size,
                "dimension": stratum_dimension(o.representative, check_regular=False),
            }
            for o in orbits(subs)
        ]
    else:
        doc["subdivisions"] = [s.to_json() for s in subs]
    return doc, 0


def cmd_regularity(args, config: RunConfig) -> Outcome:
    s = validate_subdivision_payload(load_document(args.subdivision))
    result = is_regular(s)
    return {
        "regular": result.regular,
        "witness": result.witness.to_json()["heights"] if result.witness else None,
        "refutation": _refutation_json(result.refutation),
    }, 0


def cmd_from_heights(args, config: RunConfig) -> Outcome:
    h = validate_heights_payload(load_document(args.heights))
    s = from_heights(h)
    return {
        **s.to_json(),
        "dimension": stratum_dimension(s, check_regular=False),
        "corner_cuts": [cut.to_json() for cut in detect(s).cuts],
    }, 0


def cmd_bullet(args, config: RunConfig) -> Outcome:
    if (args.subdivision is None) == (args.heights is None):
        raise InvalidInput("bullet takes exactly one of --subdivision or --heights")
    if args.heights is not None:
        h = validate_heights_payload(load_document(args.heights))
        bullet = modify_heights(h)
        return {
            "subdivision": from_heights(bullet).to_json(),
            "heights": bullet.to_json()["heights"],
            "drops": {point_key(m): format_rational(q) for m, q in sorted(apex_drops(h).items())},
            "corner_cuts": [cut.to_json() for cut in detect(from_heights(h)).cuts],
        }, 0
    s = validate_subdivision_payload(load_document(args.subdivision))
    return {
        "subdivision": modify(s).to_json(),
        "corner_cuts": [cut.to_json() for cut in detect(s).cuts],
    }, 0


def cmd_classify(args, config: RunConfig) -> Outcome:
    s = validate_subdivision_payload(load_document(args.subdivision))
    c = validate_coefficients_payload(load_document(args.coefficients))
    return classify_report(s, c), 0


def _h1_entry(s) -> dict:
    return {**s.to_json(), **h1_torus(s).to_json(), "reduction": reduce_and_verdict(s)}


def cmd_h1(args, config: RunConfig) -> Outcome:
    if args.all == (args.subdivision is not None):
        raise InvalidInput("h1 takes exactly one of --all or --subdivision")
    if args.subdivision is not None:
        entry = _h1_entry(validate_subdivision_payload(load_document(args.subdivision)))
        return entry, 0 if entry["reduction"] == TRIVIAL_BY_REDUCTION else 2
    entries = parallel_map(_h1_entry, enumerate_all(), config.workers)
    nontrivial = [e for e in entries if not e["trivial"]]
    inconclusive = [e for e in entries if e["reduction"] != TRIVIAL_BY_REDUCTION]
    doc = {
        "count": len(entries),
        "trivial": len(entries) - len(nontrivial),
        "trivial_by_reduction": len(entries) - len(inconclusive),
        "nontrivial": nontrivial,
        "inconclusive": inconclusive,
    }
    return doc, 0 if not nontrivial and not inconclusive else 2


def cmd_vinberg(args, config: RunConfig) -> Outcome:
    request = {"max_height": config.max_height}
    if args.gram is not None:
        doc = load_document(args.gram)
        request.update(doc if isinstance(doc, dict) else {"gram": doc})
    else:
        request["lattice"] = args.lattice
    if args.v0 is not None:
        try:
            request["v0"] = [int(x) for x in args.v0.split(",")]
        except ValueError as e:
            raise InvalidInput("--v0 takes comma-separated integers") from e
    if args.window is not None:
        request["window"] = args.window
    elif args.lattice == "odd1" and args.gram is None:
        request["window"] = config.window
    params = validate_vinberg_request(request)
    result = vinberg_run(
        params["lattice"],
        params["v0"],
        params["max_height"],
        window=params["window"],
        stop_when_finite=args.stop_when_finite,
    )
    if args.dot:
        _write(args.dot, coxeter_diagram(result.accepted, params["lattice"]).to_dot())
    return result.to_json(), 0


def cmd_subdiagrams(args, config: RunConfig) -> Outcome:
    if args.diagram == "odd1":
        window = args.window or config.window
        elliptic, parabolic = classify_subdiagrams(odd1_diagram(window), args.rank, planar_window=window)
        doc = {"window": window}
    else:
        data = load_document(args.diagram)
        gram = data.get("gram") if isinstance(data, dict) else None
        if not isinstance(gram, list) or any(len(row) != len(gram) for row in gram):
            raise InvalidInput("Diagram document needs a square gram matrix", payload={"field": "gram"})
        labels = [tuple(x) for x in data.get("labels", [[i] for i in range(len(gram))])]
        diagram = diagram_from_gram(labels, [[int(x) for x in row] for row in gram])
        elliptic, parabolic = classify_subdiagrams(diagram, args.rank)
        doc = {"finite_volume": finite_volume_check(diagram, args.rank)}
    doc.update(
        {
            "elliptic": [c.to_json() for c in elliptic],
            "parabolic": [c.to_json() for c in parabolic],
            "classes": len(elliptic) + len(parabolic),
        }
    )
    return doc, 0


def cmd_invariants(args, config: RunConfig) -> Outcome:
    return invariants_report(), 0


def cmd_atlas(args, config: RunConfig) -> Outcome:
    atlas = boundary_atlas()
    if args.dot:
        _write(args.dot, atlas.to_dot())
    return {**atlas.to_json(), "maximal_components": maximal_components(atlas)}, 0


def _even_classes(config: RunConfig):
    lattice, v0 = named_lattice("even")
    result = vinberg_run(lattice, v0, config.max_height, stop_when_finite=True)
    return classify_subdiagrams(coxeter_diagram(result.accepted, lattice), lattice.rank)


def cmd_crosscheck(args, config: RunConfig) -> Outcome:
    atlas = boundary_atlas()
    reports = {}
    if args.cusp in ("even", "all"):
        reports["even"] = crosscheck_even(atlas, *_even_classes(config))
    if args.cusp in ("odd1", "all"):
        reports["odd1"] = crosscheck_odd1(atlas, *odd1_classification(config.window))
    matched = all(r.matched for r in reports.values())
    return {name: r.to_json() for name, r in reports.items()}, 0 if matched else 2


# ---------------------------------------------------------------------------
# verify-all
# ---------------------------------------------------------------------------


def check_regularity(config: RunConfig) -> dict:
    subs = enumerate_all()
    irregular = [s for s in subs if not is_regular(s).regular]
    census = dimension_census(subs)
    return {
        "passed": not irregular and census == EXPECTED_CENSUS,
        "count": len(subs),
        "census": census,
        "irregular": len(irregular),
    }


def check_secondary_dimension(config: RunConfig) -> dict:
    subs = enumerate_all()
    triangulations = [s for s in subs if s.is_triangulation]
    varying = [
        o.representative
        for o in orbits(subs)
        if len({stratum_dimension(m, check_regular=False) for m in o.members}) != 1
    ]
    top = stratum_dimension(TRIVIAL)
    return {
        "passed": top == 4
        and all(stratum_dimension(t, check_regular=False) == 0 for t in triangulations)
        and not varying,
        "trivial": top,
        "triangulations": len(triangulations),
    }


def check_bullet(config: RunConfig) -> dict:
    rng = random.Random(config.seed)
    failures = []
    for _ in range(config.samples):
        h = HeightFunction.of([rng.randint(-5, 5) for _ in range(8)])
        s = from_heights(h)
        bullet = from_heights(modify_heights(h))
        ok = (
            bullet == modify(s)
            and not detect(bullet)
            and modify(bullet) == bullet
            and validate(bullet) == bullet
        )
        if not ok:
            failures.append(h.to_json()["heights"])
    return {"passed": not failures, "samples": config.samples, "failures": failures[:5]}


def _h1_check(s) -> bool:
    return h1_torus(s).is_trivial and reduce_and_verdict(s) == TRIVIAL_BY_REDUCTION


def check_h1(config: RunConfig) -> dict:
    subs = enumerate_all()
    results = parallel_map(_h1_check, subs, config.workers)
    return {"passed": all(results), "count": len(subs), "failures": results.count(False)}


def check_cell_census(config: RunConfig) -> dict:
    counts = Counter()
    errors = 0
    for s in enumerate_all():
        for cell in modify(s).cells:
            try:
                counts[cell_type(cell)] += 1
            except CubeKsbaError:
                errors += 1
    return {"passed": errors == 0 and set(counts) <= set("abcd"), "types": dict(sorted(counts.items()))}


def check_invariants(config: RunConfig) -> dict:
    report = invariants_report()
    covers = [c["K_X^2"] for c in report["covers"]]
    ample = all(entry["ample"] for entry in report["log_canonical"].values())
    return {
        "passed": report["hexagon_identity_holds"] and covers == EXPECTED_COVERS and ample,
        "hexagon_square": report["hexagon_square"],
        "covers": covers,
    }


def check_odd1(config: RunConfig) -> dict:
    lattice, v0 = named_lattice("odd1")
    w = config.window
    expected = sorted(odd1_root(a, b) for a in range(-w, w + 1) for b in range(-w, w + 1))
    step_one = roots_at_height(lattice, v0, 1, window=w)
    points = [(a, b) for a in range(-w, w + 1) for b in range(-w, w + 1)]
    gram_ok = all(
        lattice.inner(odd1_root(*p), odd1_root(*q)) == odd1_gram(p, q) for p in points for q in points
    )
    result = vinberg_run(lattice, v0, max_height=10, window=w)
    late = [r for r in result.accepted if result.heights[r] > 1]
    edges = {odd1_gram((0, 0), q) for q in ((1, 0), (1, 1), (2, 0))}
    return {
        "passed": sorted(step_one) == expected and gram_ok and not late and edges == {0, 1, 3},
        "roots": len(step_one),
        "late_acceptances": len(late),
    }


def check_odd2(config: RunConfig) -> dict:
    lattice = LATTICES["odd2"]
    found = norm_vector_search(lattice, config.search_bound)
    return {"passed": not found and lattice.is_even, "bound": config.search_bound, "found": len(found)}


def check_crosschecks(config: RunConfig) -> dict:
    atlas = boundary_atlas()
    even = crosscheck_even(atlas, *_even_classes(config))
    odd1 = crosscheck_odd1(atlas, *odd1_classification(config.window))
    return {
        "passed": even.matched and odd1.matched and len(odd1.classes) == 3,
        "even": even.to_json()["counts"],
        "odd1": odd1.to_json()["counts"],
    }


def check_components(config: RunConfig) -> dict:
    dims = maximal_components()
    return {"passed": dims == [3, 3, 1], "maximal": dims}


def _oracle_sample(rng: random.Random, n: int) -> CoefficientAssignment:
    """Every fourth draw is singular by construction, every fourth a reducible form"""
    if n % 4 == 0:
        point = []
        while len(point) < 3:
            p = (rng.randint(-2, 2), rng.randint(-2, 2))
            if p != (0, 0):
                point.append(p)
        return singular_coefficients(point, rng)
    if n % 4 == 1:
        linear = [rng.randint(-3, 3) for _ in range(2)]
        bilinear = [rng.randint(-3, 3) for _ in range(4)]
        return CoefficientAssignment.of([a * b for a in linear for b in bilinear])
    return CoefficientAssignment.of([rng.randint(-3, 3) for _ in range(8)])


def check_hyperdeterminant(config: RunConfig) -> dict:
    rng = random.Random(config.seed)
    mismatches = vanishing = 0
    for n in range(config.oracle_samples):
        c = _oracle_sample(rng, n)
        det = hyperdeterminant_222(c)
        vanishing += det == 0
        if (det == 0) != has_singular_point(c):
            mismatches += 1
        elif det != discriminant_hyperdeterminant(c):
            mismatches += 1
        elif any(abs(hyperdeterminant_222(c.permuted(row))) != abs(det) for row in SYM_Q_TABLE):
            mismatches += 1
    return {
        "passed": mismatches == 0,
        "samples": config.oracle_samples,
        "vanishing": vanishing,
        "mismatches": mismatches,
    }


def check_even_stability(config: RunConfig) -> dict:
    lattice, v0 = named_lattice("even")
    first = vinberg_run(lattice, v0, config.max_height, stop_when_finite=True)
    later = vinberg_run(lattice, v0, first.last_height + 5)
    return {
        "passed": first.terminated and later.accepted == first.accepted,
        "finite_at_height": first.last_height,
        "roots": len(first.accepted),
    }


CHECKS: Dict[str, Callable[[RunConfig], dict]] = {
    "regularity": check_regularity,
    "secondary-dimension": check_secondary_dimension,
    "bullet-map": check_bullet,
    "h1": check_h1,
    "cell-census": check_cell_census,
    "invariants": check_invariants,
    "odd1-vinberg": check_odd1,
    "odd2-search": check_odd2,
    "crosschecks": check_crosschecks,
    "components": check_components,
    "hyperdeterminant": check_hyperdeterminant,
    "even-stability": check_even_stability,
}


def _run_check(item: Tuple[str, RunConfig]) -> Tuple[str, dict]:
    name, config = item
    try:
        with timed(logger, f"verify-all: {name}") as info:
            result = CHECKS[name](config)
            info["passed"] = result["passed"]
        return name, result
    except CubeKsbaError as e:
        return name, {"passed": False, "error": e.to_dict()}


def cmd_verify_all(args, config: RunConfig) -> Outcome:
    # checks fan out; the h1 check then runs serially inside its worker
    inner = RunConfig(**{**config.__dict__, "workers": 1})
    results = dict(parallel_map(_run_check, [(name, inner) for name in CHECKS], config.workers))
    failed = sorted(name for name, r in results.items() if not r["passed"])
    if failed:
        logger.warning(f"verify-all: failed {', '.join(failed)}")
    return {"checks": results, "failed": failed, "passed": not failed}, 0 if not failed else 2


COMMANDS = {
    "enumerate": cmd_enumerate,
    "regularity": cmd_regularity,
    "from-heights": cmd_from_heights,
    "bullet": cmd_bullet,
    "classify": cmd_classify,
    "h1": cmd_h1,
    "vinberg": cmd_vinberg,
    "subdiagrams": cmd_subdiagrams,
    "invariants": cmd_invariants,
    "atlas": cmd_atlas,
    "crosscheck": cmd_crosscheck,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", help="Write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=SEED, help="Seed for randomized checks")
    common.add_argument("--workers", type=int, default=WORKER_COUNT, help="Process pool size")
    common.add_argument("--samples", type=int, default=PROPERTY_SAMPLES)
    common.add_argument("--oracle-samples", type=int, default=ORACLE_SAMPLES)

    parser = _Parser(prog="cube-ksba", description="Cube KSBA toolkit")
    parser.add_argument("--help-schemas", action="store_true", help="Print every JSON schema and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("enumerate", parents=[common], help="All subdivisions of the cube")
    p.add_argument("--triangulations-only", action="store_true")
    p.add_argument("--up-to-symmetry", action="store_true")
    p.add_argument("--corner-cut-free", action="store_true")

    p = sub.add_parser("regularity", parents=[common], help="Regularity witness or refutation")
    p.add_argument("--subdivision", required=True, help="Subdivision JSON (inline or file)")

    p = sub.add_parser("from-heights", parents=[common], help="Subdivision induced by heights")
    p.add_argument("--heights", required=True)

    p = sub.add_parser("bullet", parents=[common], help="Bullet map")
    p.add_argument("--subdivision")
    p.add_argument("--heights")

    p = sub.add_parser("classify", parents=[common], help="Degeneration classification")
    p.add_argument("--subdivision", required=True)
    p.add_argument("--coefficients", required=True)

    p = sub.add_parser("h1", parents=[common], help="Torus-sheaf H^1")
    p.add_argument("--all", action="store_true")
    p.add_argument("--subdivision")

    p = sub.add_parser("vinberg", parents=[common], help="Vinberg's algorithm")
    p.add_argument("--lattice", choices=sorted(LATTICES), default="even")
    p.add_argument("--gram", help="Gram matrix JSON (inline or file); overrides --lattice")
    p.add_argument("--v0", help="Initial vector, comma-separated")
    p.add_argument("--max-height", type=int, default=VINBERG_MAX_HEIGHT)
    p.add_argument("--window", type=int)
    p.add_argument("--stop-when-finite", action="store_true")
    p.add_argument("--dot", help="Write the Coxeter diagram in DOT format")

    p = sub.add_parser("subdiagrams", parents=[common], help="Elliptic and parabolic subdiagrams")
    p.add_argument("--diagram", required=True, help='Diagram JSON, or "odd1"')
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--window", type=int)

    sub.add_parser("invariants", parents=[common], help="Intersection invariants")

    p = sub.add_parser("atlas", parents=[common], help="Boundary strata")
    p.add_argument("--dot", help="Write the stratum poset in DOT format")

    p = sub.add_parser("crosscheck", parents=[common], help="Strata against subdiagram classes")
    p.add_argument("cusp", choices=["even", "odd1", "all"])
    p.add_argument("--max-height", type=int, default=VINBERG_MAX_HEIGHT)
    p.add_argument("--window", type=int)

    sub.add_parser("verify-all", parents=[common], help="Run every acceptance check")
    return parser


def _config(args) -> RunConfig:
    overrides = {
        "command": args.command,
        "output": getattr(args, "output", None),
        "seed": getattr(args, "seed", SEED),
        "workers": getattr(args, "workers", WORKER_COUNT),
        "samples": getattr(args, "samples", PROPERTY_SAMPLES),
        "oracle_samples": getattr(args, "oracle_samples", ORACLE_SAMPLES),
    }
    if getattr(args, "max_height", None) is not None:
        overrides["max_height"] = args.max_height
    if getattr(args, "window", None) is not None:
        overrides["window"] = args.window
    return RunConfig(**overrides)


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.help_schemas:
            print(json.dumps(SCHEMAS, indent=2, sort_keys=True))
            return 0
        if args.command is None:
            raise InvalidInput("A command is required; see --help")
        config = _config(args)
        doc, code = COMMANDS[args.command](args, config)
    except CubeKsbaError as e:
        print(json.dumps(e.to_dict(), sort_keys=True), file=sys.stderr)
        return e.exit_code

    report = json.dumps({"command": config.command, "seed": config.seed, "result": doc}, indent=2, sort_keys=True)
    if config.output:
        _write(config.output, report)
    else:
        print(report)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
