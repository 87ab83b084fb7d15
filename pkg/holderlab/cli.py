"""
Command-line interface.

    holderlab bounds curve --alpha-min 0.01 --alpha-max 0.99 --steps 100
    holderlab sier scheme --depth 3 --histogram
    holderlab phi eval --blocks "333|333" --kstar 3 --w 1
    holderlab cross transition --m 4 --L 16 --alpha 0.9

Audit and verify commands exit with 1 when an invariant fails; bad arguments
exit with 2.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import yaml
from pydantic import ValidationError

from .bounds import (
    asymptotic_gap,
    curve_table,
    invert_h,
    series_exponent_fit,
    series_term,
    tail_index,
)
from .config import config
from .cross.approx import piecewise_affine_approx
from .cross.audit import conductivity_audit, conductivity_sweep
from .cross.complex import CrossComplex
from .cross.model import build_cross, classification_rows, model_record, type_counts
from .cross.phi import (
    cross_phi_eval,
    cross_phi_holder,
    cross_phi_of_fraction,
    level_section_slope,
)
from .cross.transition import feasibility_threshold, transition_bounds
from .errors import HolderLabError
from .export import stream_jsonl, write_output
from .levelset.complex import CellComplex, TriangleComplex
from .levelset.engine import (
    LevelQuery,
    front_slope,
    front_stats,
    mu_kappa_sweep,
    random_cover_audit,
    sample_queries,
)
from .levelset.fields import (
    VertexField,
    affine_field,
    random_holder_field,
    xcoord_field,
)
from .models import AuditReport, RunConfig
from .parallel import item_rng, spawn_seeds
from .phi.admissible import AdmissibleSet, parse_blocks
from .phi.audits import (
    ab_monotone_audit,
    consistency_audit,
    cylinder_image_audit,
    diameter_floor_audit,
    dimension_certificate,
    holder_audit,
    holder_hypothesis_margin,
    level_cell_count,
    optimize_params,
    rank_oracle_audit,
)
from .phi.witness import Witness
from .scheme import (
    cover_audit as scheme_cover_audit,
    expand_scheme,
    geometric_child_audit,
    histogram,
    verify_kappa_lemma,
)

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], int]

AUDIT_FLAGS = ("holder", "levels", "consistency", "cylinders", "rank", "monotone")


class UsageError(Exception):
    """Argument combination the parser cannot express."""


def _emit(args: argparse.Namespace, payload: Any, default: str = "json") -> None:
    write_output(payload, args.format or default, args.output)


def _audit_exit(reports: List[AuditReport]) -> int:
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.error(f"Audits failed: {', '.join(failed)}")
        return 1
    return 0


def _seeds(seed: int, count: int) -> List[int]:
    """Per-item integer seeds split from one run seed."""
    return [int(s.generate_state(1)[0]) for s in spawn_seeds(seed, count)]


# -- bounds ------------------------------------------------------------------


def cmd_bounds_curve(args: argparse.Namespace) -> int:
    if not 0 < args.alpha_min < args.alpha_max < 1:
        raise UsageError("Need 0 < --alpha-min < --alpha-max < 1")
    if args.log_grid:
        grid = np.geomspace(args.alpha_min, args.alpha_max, args.steps)
    else:
        grid = np.linspace(args.alpha_min, args.alpha_max, args.steps)
    table = curve_table(grid)
    _emit(args, table.rows, "csv")
    if table.violations:
        logger.error(f"Ordering invariants fail at rows {table.violations}")
        return 1
    return 0


def cmd_bounds_invert(args: argparse.Namespace) -> int:
    t = float(invert_h(args.kind, args.alpha))
    _emit(args, {"kind": args.kind, "alpha": args.alpha, "t": t})
    return 0


def cmd_bounds_series(args: argparse.Namespace) -> int:
    term = series_term(args.n, args.d1, args.alpha, args.kind)
    record: Dict[str, Any] = term.model_dump(mode="json")
    record.update(series_exponent_fit(args.d1, args.alpha, args.kind))
    if record["exponent"] < 0:
        record["tail_index"] = tail_index(args.d1, args.alpha, args.kind)
    _emit(args, record)
    return 0


def cmd_bounds_gap(args: argparse.Namespace) -> int:
    alphas = [10.0**-k for k in range(1, args.decades + 1)]
    gaps = np.atleast_1d(asymptotic_gap(alphas))
    rows = [{"alpha": a, "gap": float(g)} for a, g in zip(alphas, gaps)]
    _emit(args, rows, "csv")
    return 0 if np.all(np.diff(gaps) < 0) else 1


# -- sier ----------------------------------------------------------------------


def cmd_sier_scheme(args: argparse.Namespace) -> int:
    atlas = expand_scheme(args.depth, cache_dir=args.cache_dir)
    reports: List[AuditReport] = []
    payload: List[Any] = []
    if args.histogram:
        hist = histogram(atlas, args.depth)
        payload.append(hist)
        if not hist.matches:
            reports.append(
                AuditReport(name="histogram", passed=False, checked=hist.total)
            )
    if args.verify:
        reports += [
            verify_kappa_lemma(atlas),
            scheme_cover_audit(atlas, args.depth),
            geometric_child_audit(atlas, min(2 * args.depth - 1, 6)),
        ]
        payload += reports
    if args.export:
        stream_jsonl(
            (
                {"n": n, "address": str(node.address), "kexp": node.kexp}
                for n in range(1, atlas.max_n + 1)
                for node in atlas.nodes(n)
            ),
            args.export,
        )
    if not payload:
        payload = [{"n": n, "nodes": atlas.size(n)} for n in sorted(atlas.levels)]
    _emit(args, payload)
    return _audit_exit(reports) if atlas.complete else 1


def _build_complex(args: argparse.Namespace) -> CellComplex:
    if args.complex == "cross":
        return CrossComplex(args.m, args.depth)
    return TriangleComplex(args.depth)


def _build_field(cx: CellComplex, spec: Dict[str, Any], seed: int) -> VertexField:
    kind = spec.get("kind", "xcoord")
    if kind == "xcoord":
        return xcoord_field(cx, exact=bool(spec.get("exact", False)))
    if kind == "affine":
        return affine_field(
            cx,
            float(spec.get("a", 1.0)),
            float(spec.get("b", 0.5)),
            float(spec.get("c", 0.0)),
        )
    if kind == "random":
        if not isinstance(cx, TriangleComplex):
            raise UsageError("Random Hölder fields live on the triangle complex")
        return random_holder_field(
            cx,
            int(spec.get("seed", seed)),
            c=float(spec.get("c", 1.0)),
            alpha=float(spec.get("alpha", 0.5)),
        )
    raise UsageError(f"Unknown field kind {kind!r}")


def _field_spec(fn: str) -> Dict[str, Any]:
    if fn in ("xcoord", "affine", "random"):
        return {"kind": fn}
    try:
        with open(fn, encoding="utf-8") as fh:
            spec = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as e:
        raise UsageError(f"Cannot read field file {fn}: {e}") from e
    if not isinstance(spec, dict):
        raise UsageError(f"Field file {fn} must hold a mapping")
    return spec


def cmd_sier_levelset(args: argparse.Namespace) -> int:
    cx = _build_complex(args)
    fld = _build_field(cx, _field_spec(args.fn), args.seed)
    if args.r == "sweep":
        queries = sample_queries(fld, args.queries, args.seed)
    else:
        queries = [LevelQuery(Fraction(args.r) if fld.exact else float(args.r))]

    rows: List[Dict[str, Any]] = []
    if args.d1 is not None:
        atlas = expand_scheme(max(1, (args.depth + 1) // 2), cache_dir=args.cache_dir)
        for q in queries:
            for row in front_stats(fld, q, atlas, args.d1):
                rows.append({"r": float(q.r), **row.model_dump(mode="json")})
    else:
        for q in queries:
            report = front_slope(fld, q, range(0, args.depth + 1))
            for n, count, slope in zip(report.levels, report.counts, report.slopes):
                rows.append(
                    {"r": float(q.r), "n": n, "front_size": count, "slope": slope}
                )
    _emit(args, rows, "csv")
    return 0


def cmd_sier_verify(args: argparse.Namespace) -> int:
    if args.suite == "cover":
        reports = [
            random_cover_audit(TriangleComplex(1), args.trials, args.seed),
            random_cover_audit(CrossComplex(args.m, 1), args.trials, args.seed),
        ]
    elif args.suite == "mu":
        atlas = expand_scheme(args.depth, cache_dir=args.cache_dir)
        reports = [
            mu_kappa_sweep(
                atlas,
                args.depth,
                _seeds(args.seed, args.trials),
                queries_per_field=args.queries,
                workers=args.workers,
            )
        ]
    else:
        atlas = expand_scheme(max(1, (args.depth + 1) // 2), cache_dir=args.cache_dir)
        cx = TriangleComplex(args.depth)
        checked = failed = 0
        for s in _seeds(args.seed, args.trials):
            fld = random_holder_field(cx, s)
            for q in sample_queries(fld, args.queries, s):
                for row in front_stats(fld, q, atlas, args.d1):
                    checked += 1
                    failed += row.cert_lowbox is False
        reports = [
            AuditReport(
                name="front_lowbox",
                passed=failed == 0,
                checked=checked,
                violations=failed,
                details={"d1": args.d1, "depth": args.depth},
            )
        ]
    _emit(args, reports)
    return _audit_exit(reports)


# -- phi -----------------------------------------------------------------------


def _aset(args: argparse.Namespace) -> AdmissibleSet:
    return AdmissibleSet(args.kstar, args.w)


def cmd_phi_build(args: argparse.Namespace) -> int:
    if args.kstar is not None and args.w is not None:
        alpha = args.alpha if args.alpha is not None else 0.0
        cert = dimension_certificate(args.kstar, args.w, alpha)
        _emit(args, cert)
        if cert.hypothesis_margin < 0:
            logger.error(
                f"#blocks = {cert.size} < 2^((k*+w) alpha) = "
                f"{2 ** ((args.kstar + args.w) * alpha):.6g}"
            )
            return 1
        return 0
    if args.alpha is None or args.eps is None:
        raise UsageError("Give --alpha and --eps, or --kstar and --w")
    _emit(args, optimize_params(args.alpha, args.eps))
    return 0


def cmd_phi_eval(args: argparse.Namespace) -> int:
    _emit(args, Witness(_aset(args)).eval_blocks(parse_blocks(args.blocks)))
    return 0


def _level_cells_audit(
    aset: AdmissibleSet, depth: int, trials: int, seed: int
) -> AuditReport:
    rng = item_rng(seed, 0)
    checked, worst = 0, 0.0
    bad: List[str] = []
    # n blocks refine to triangle level n (k* + w); stay within --depth
    top = max(1, depth // (aset.k_star + aset.w))
    for r in rng.uniform(0.0, 1.0, size=trials).tolist():
        for n in range(1, top + 1):
            rec = level_cell_count(aset, r, n)
            checked += 1
            worst = max(worst, rec.count / rec.bound)
            if rec.count > rec.bound:
                bad.append(f"r={r} n={n} count={rec.count}")
    return AuditReport(
        name="level_cells",
        passed=not bad,
        checked=checked,
        violations=len(bad),
        max_ratio=worst,
        details={"depth": depth},
        samples=bad[:20],
    )


def cmd_phi_audit(args: argparse.Namespace) -> int:
    aset = _aset(args)
    chosen = {
        name
        for name in AUDIT_FLAGS
        if getattr(args, name)
    } or {"holder", "levels", "consistency", "cylinders", "monotone"}
    reports: List[AuditReport] = []
    if "holder" in chosen:
        margin = holder_hypothesis_margin(aset, args.alpha)
        if margin < 0:
            raise UsageError(
                f"#blocks = {aset.size} < 2^((k*+w) alpha) for alpha={args.alpha}"
            )
        reports.append(holder_audit(aset, args.alpha, args.depth))
    if "levels" in chosen:
        reports.append(_level_cells_audit(aset, args.depth, args.trials, args.seed))
    if "consistency" in chosen:
        reports.append(consistency_audit(aset, args.depth))
    if "cylinders" in chosen:
        m = min(args.depth, 3)
        reports += [cylinder_image_audit(aset, m), diameter_floor_audit(aset, m)]
    if "rank" in chosen:
        reports.append(rank_oracle_audit(aset, min(args.depth, 3)))
    if "monotone" in chosen:
        reports.append(ab_monotone_audit(aset, args.depth))
    _emit(args, reports)
    return _audit_exit(reports)


# -- cross ---------------------------------------------------------------------


def cmd_cross_build(args: argparse.Namespace) -> int:
    _emit(args, model_record(build_cross(args.m)))
    return 0


def cmd_cross_classify(args: argparse.Namespace) -> int:
    model = build_cross(args.m)
    if args.counts:
        _emit(args, type_counts(model, args.L))
    else:
        _emit(args, classification_rows(model, args.L, args.level), "csv")
    return 0


def cmd_cross_phi(args: argparse.Namespace) -> int:
    record: Dict[str, Any] = {"m": args.m}
    if args.x is not None:
        record.update(x=args.x, value=str(cross_phi_eval(args.m, args.x)))
    if args.fraction is not None:
        value = cross_phi_of_fraction(args.m, Fraction(args.fraction))
        record.update(fraction=args.fraction, fraction_value=str(value))
    if args.holder is not None:
        record["holder_ratio"] = cross_phi_holder(args.m, args.holder)
    if args.sections is not None:
        counts, slope = level_section_slope(
            args.m, args.sections, range(1, args.levels + 1)
        )
        record.update(r=args.sections, section_counts=counts, section_slope=slope)
    if len(record) == 1:
        raise UsageError("Give --x, --fraction, --holder or --sections")
    _emit(args, record)
    return 0


def cmd_cross_audit(args: argparse.Namespace) -> int:
    report = conductivity_sweep(
        args.m,
        args.L,
        args.depth,
        _seeds(args.seed, args.trials),
        queries_per_field=args.queries,
        workers=args.workers,
    )
    reports = [report]
    if args.xcoord is not None:
        cx = CrossComplex(args.m, args.depth)
        reports.append(
            conductivity_audit(xcoord_field(cx), LevelQuery(args.xcoord), args.L)
        )
    _emit(args, reports)
    return _audit_exit(reports)


def cmd_cross_approx(args: argparse.Namespace) -> int:
    cx = CrossComplex(args.m, args.n + 1)
    fld = affine_field(cx, args.a, args.b)
    lipschitz = float(np.hypot(args.a, args.b))
    result = piecewise_affine_approx(fld, args.n, lipschitz)
    _emit(args, result.reports)
    return _audit_exit(result.reports)


def cmd_cross_transition(args: argparse.Namespace) -> int:
    record = transition_bounds(args.m, args.L, args.alpha)
    if not record.feasible:
        logger.warning(f"L={args.L} is infeasible: the thick phase needs L > 9")
    _emit(args, record)
    return 0


def cmd_cross_threshold(args: argparse.Namespace) -> int:
    _emit(args, {"threshold": feasibility_threshold(args.tol)})
    return 0


# -- parser --------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level", default=config.LOG_LEVEL, help="Logging level (INFO, DEBUG, ...)"
    )
    common.add_argument(
        "--workers", type=int, default=config.WORKERS, help="Worker threads"
    )
    common.add_argument("--output", default=None, help="Output file (default stdout)")
    common.add_argument(
        "--format", choices=["csv", "jsonl", "json"], default=None, help="Output format"
    )
    common.add_argument(
        "--seed", type=int, default=config.DEFAULT_SEED, help="Run seed"
    )
    common.add_argument(
        "--cache-dir", default=None, help="Checkpoint directory for scheme levels"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holderlab", description="Hölder thickness computations and audits"
    )
    common = _common()
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(
        group: Any, name: str, handler: Handler, text: str
    ) -> argparse.ArgumentParser:
        sub = group.add_parser(name, parents=[common], help=text)
        sub.set_defaults(handler=handler)
        return sub

    bounds = groups.add_parser(
        "bounds", help="Lower and upper bound curves"
    ).add_subparsers(dest="command", required=True)
    p = leaf(bounds, "curve", cmd_bounds_curve, "Inverse bound curves on an alpha grid")
    p.add_argument("--alpha-min", type=float, default=0.01)
    p.add_argument("--alpha-max", type=float, default=0.99)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--log-grid", action="store_true", help="Geometric alpha grid")
    p = leaf(bounds, "invert", cmd_bounds_invert, "Solve h(t) = alpha")
    p.add_argument(
        "--kind",
        choices=["lower_hausdorff", "lower_box", "upper_witness"],
        default="lower_hausdorff",
    )
    p.add_argument("--alpha", type=float, required=True)
    p = leaf(bounds, "series", cmd_bounds_series, "One term of the conductivity series")
    p.add_argument("--d1", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--kind", choices=["hausdorff", "box"], default="hausdorff")
    p.add_argument("--n", type=int, default=400)
    p = leaf(bounds, "gap", cmd_bounds_gap, "Relative gap of the curves as alpha -> 0")
    p.add_argument("--decades", type=int, default=6)

    sier = groups.add_parser("sier", help="Sierpiński triangle").add_subparsers(
        dest="command", required=True
    )
    p = leaf(sier, "scheme", cmd_sier_scheme, "Enumerate the conductivity scheme")
    p.add_argument("--depth", type=int, required=True, help="Scheme level")
    p.add_argument("--histogram", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--export", default=None, help="JSON lines file for all nodes")
    p = leaf(sier, "levelset", cmd_sier_levelset, "Front sizes of level sets")
    p.add_argument(
        "--fn", default="xcoord", help="xcoord, affine, random or a YAML file"
    )
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--r", default="sweep", help="Level value or 'sweep'")
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--d1", type=float, default=None)
    p.add_argument("--complex", choices=["triangle", "cross"], default="triangle")
    p.add_argument("--m", type=int, default=3)
    p = leaf(sier, "verify", cmd_sier_verify, "Randomized invariant suites")
    p.add_argument("--suite", choices=["cover", "mu", "front"], required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--d1", type=float, default=0.5)
    p.add_argument("--m", type=int, default=3)

    phi = groups.add_parser("phi", help="The Hölder witness").add_subparsers(
        dest="command", required=True
    )
    p = leaf(phi, "build", cmd_phi_build, "Choose or certify block parameters")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--kstar", type=int, default=None)
    p.add_argument("--w", type=int, default=None)
    for name, handler, text in (
        ("eval", cmd_phi_eval, "Value enclosure on a block cylinder"),
        ("audit", cmd_phi_audit, "Witness audits"),
    ):
        p = leaf(phi, name, handler, text)
        p.add_argument("--kstar", type=int, default=3)
        p.add_argument("--w", type=int, default=1)
        if name == "eval":
            p.add_argument("--blocks", required=True, help='"b1|b2|..." digit blocks')
        else:
            for flag in AUDIT_FLAGS:
                p.add_argument(f"--{flag}", action="store_true")
            p.add_argument("--depth", type=int, default=4)
            p.add_argument("--alpha", type=float, default=0.5)
            p.add_argument("--trials", type=int, default=100)

    cross = groups.add_parser("cross", help="The cross construction").add_subparsers(
        dest="command", required=True
    )
    p = leaf(cross, "build", cmd_cross_build, "Retained level-one squares")
    p.add_argument("--m", type=int, required=True)
    p = leaf(cross, "classify", cmd_cross_classify, "Square classes and conductivities")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--counts", action="store_true", help="Only the type census")
    p = leaf(cross, "phi", cmd_cross_phi, "The cross function")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--x", default=None, help='Digits "d1,d2,(p1,p2)"')
    p.add_argument("--fraction", default=None, help="Rational point p/q")
    p.add_argument("--holder", type=int, default=None, help="Grid exponent K")
    p.add_argument("--sections", type=float, default=None, help="Level r")
    p.add_argument("--levels", type=int, default=6)
    p = leaf(cross, "audit", cmd_cross_audit, "Conductivity of level-set fronts")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--L", type=int, default=4)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--queries", type=int, default=4)
    p.add_argument("--xcoord", type=float, default=None, help="Also audit x at this r")
    p = leaf(cross, "approx", cmd_cross_approx, "Piecewise-affine approximation")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.5)
    p = leaf(cross, "transition", cmd_cross_transition, "Phase-transition bounds")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p = leaf(cross, "threshold", cmd_cross_threshold, "Smallest feasible L")
    p.add_argument("--tol", type=float, default=1e-10)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(levelname)s - %(message)s",
    )

    try:
        run = RunConfig(
            command=f"{args.group} {args.command}",
            seed=args.seed,
            output=args.output,
            format=args.format or "json",
            workers=args.workers,
        )
    except ValidationError as e:
        parser.error(str(e))
    # Update config with CLI args
    config.WORKERS = run.workers
    if args.cache_dir:
        config.CACHE_DIR = args.cache_dir
    logger.info(f"Running {run.command} (seed={run.seed}, workers={run.workers})")

    try:
        return args.handler(args)
    except UsageError as e:
        parser.error(str(e))
    except HolderLabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except Exception as e:
        logger.error(f"{run.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
