"""Command-line front end: ingest, metrics, null, report, ego.

Every command is reproducible: identical inputs, flags and seed produce
byte-identical outputs.  All randomness flows from ``--seed`` (default 1729,
a fixed constant rather than entropy); realization ``k`` of the year-``y``
null ensemble draws from ``PCG64(SeedSequence((seed, y, k)))``.

The output directory defaults to the ``FLOWNET_OUT`` environment variable;
flags win over the environment.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from ._kernels import BACKEND
from .analysis import (
    lorenz_by_class,
    pearson,
    rank,
    rank_conditioned_gini,
    rank_conditioned_neighbor_cc,
    reciprocity_timeseries,
    threshold_sensitivity,
    trajectories,
)
from .export import (
    canonical_json,
    choropleth_csv,
    ego_network,
    ranking_csv,
    scores_json,
    to_dot,
)
from .ingest import (
    AFFILIATION_HEADER,
    EVENT_HEADER,
    ParseError,
    derive_events,
    format_events,
    parse_affiliations,
    parse_events,
)
from .metrics import (
    ScoreVector,
    clustering_vector,
    drain_index_vector,
    is_defined,
    reciprocity_vector,
    strength_vector,
)
from .network import active_nodes, build_network, largest_scc
from .nullmodel import InfeasibleSliceError, ensemble, ensemble_statistic
from .paths import betweenness
from .spectral import hits, pagerank

DEFAULT_SEED = 1729
DEFAULT_YEARS = "2000..2016"
ALL_METRICS = (
    "drain",
    "strength",
    "pagerank",
    "hits",
    "betweenness",
    "clustering",
    "reciprocity",
)


class CliError(Exception):
    """Fatal command error carrying the process exit status."""

    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _parse_years(text: str) -> list[int]:
    """Accept ``A..B``, a single year, or a comma list of either."""
    years: set[int] = set()
    for chunk in text.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            lo, hi = chunk.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise CliError(f"bad year range {chunk!r}")
            years.update(range(lo, hi + 1))
        elif chunk:
            years.add(int(chunk))
    if not years:
        raise CliError(f"no years in {text!r}")
    return sorted(years)


def _parse_thresholds(text: str) -> list[int]:
    values = sorted({int(chunk) for chunk in text.split(",") if chunk.strip()})
    if not values or any(v < 1 for v in values):
        raise CliError(f"thresholds must be integers >= 1, got {text!r}")
    return values


def _default_out_dir() -> str:
    return os.environ.get("FLOWNET_OUT", "flownet-out")


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write(out_dir: Path, name: str, text: str) -> str:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    data = text.encode("utf-8")
    path.write_bytes(data)
    return _sha256(data)


class Run:
    """Parsed inputs plus bookkeeping shared by the analysis commands."""

    def __init__(self, args):
        self.args = args
        self.out_dir = Path(args.out_dir)
        self.years = _parse_years(args.years)
        self.files: dict[str, str] = {}
        self.errors: list[str] = []       # always fail the run
        self.soft_errors: list[str] = []  # fail only with --strict

        path = Path(args.input)
        if not path.exists():
            raise CliError(f"input file not found: {path}")
        self.input_digest = _sha256(path.read_bytes())
        try:
            events, record_errors = parse_events(path, strict=args.strict)
        except ParseError as exc:
            raise CliError(str(exc))
        for err in record_errors:
            print(f"warning: {err}", file=sys.stderr)
        if record_errors:
            self.soft_errors.append(f"{len(record_errors)} malformed input rows")
        domain = (self.years[0], self.years[-1])
        self.net, build_report = build_network(events, domain)
        self.dropped = build_report.dropped_out_of_domain
        self.meta = {
            "input": path.name,
            "input_sha256": self.input_digest,
            "time_domain": [domain[0], domain[1]],
            "years": list(self.years),
            "roster": args.roster,
            "backend": BACKEND,
            "version": __version__,
        }

    def slice_for(self, year: int):
        s = self.net.slice(year)
        if self.args.roster == "per-year":
            s = s.restricted_to(active_nodes(s))
        if getattr(self.args, "restrict_scc", False):
            core = largest_scc(s)
            if core:
                s = s.restricted_to(core)
        return s

    def slices(self):
        return [self.slice_for(y) for y in self.years]

    def map_years(self, fn):
        """Apply ``fn`` to every analysis year, in year order, honoring --jobs."""
        jobs = max(1, getattr(self.args, "jobs", 1))
        if jobs == 1:
            return [fn(y) for y in self.years]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, self.years))

    def write(self, name: str, text: str) -> None:
        self.files[name] = _write(self.out_dir, name, text)

    def finish(self) -> int:
        for message in self.errors:
            print(f"error: {message}", file=sys.stderr)
        for message in self.soft_errors:
            print(f"error: {message}", file=sys.stderr)
        if self.errors or (self.args.strict and self.soft_errors):
            return 1
        return 0


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def _sniff_header(path: Path) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        first = handle.readline().strip().lower()
    cells = [cell.strip() for cell in first.split(",")]
    if cells == EVENT_HEADER:
        return "events"
    if cells == AFFILIATION_HEADER:
        return "affiliations"
    raise CliError(
        "input is neither an event file nor an affiliation file "
        f"(header {first!r})"
    )


def cmd_ingest(args) -> int:
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    kind = _sniff_header(path)
    try:
        if kind == "events":
            events, errors = parse_events(path, strict=args.strict)
            inferred = 0
        else:
            records, errors = parse_affiliations(path, strict=args.strict)
            events = derive_events(records)
            inferred = len(events)
    except ParseError as exc:
        raise CliError(str(exc))
    for err in errors:
        print(f"warning: {err}", file=sys.stderr)

    output = Path(args.output) if args.output else Path(_default_out_dir()) / "events.csv"
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_bytes(format_events(events).encode("utf-8"))
    print(f"events: {len(events)}")
    print(f"rejected rows: {len(errors)}")
    if kind == "affiliations":
        print(f"inferred moves: {inferred}")
    print(f"wrote {output}")
    return 1 if (errors and args.strict) else 0


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _selected_metrics(args) -> list[str]:
    if not args.metrics:
        return list(ALL_METRICS)
    selected = [token.strip() for token in args.metrics.split(",") if token.strip()]
    unknown = [token for token in selected if token not in ALL_METRICS]
    if unknown:
        raise CliError(
            f"unknown metrics: {', '.join(unknown)} (choose from {', '.join(ALL_METRICS)})"
        )
    return selected


def _year_vectors(run: Run, s, selected):
    """All selected score vectors of one slice plus iteration bookkeeping."""
    vectors = []
    iteration_info = {}
    if "drain" in selected:
        vectors.append(drain_index_vector(s))
    if "strength" in selected:
        vectors.append(strength_vector(s, "out"))
        vectors.append(strength_vector(s, "in"))
    if "pagerank" in selected:
        if s.nodes:
            vector, report = pagerank(
                s, d=run.args.damping, tol=run.args.tol, max_iter=run.args.max_iter
            )
            iteration_info["pagerank"] = report
        else:
            # per-year roster on an edgeless year: empty-but-present artifact
            vector = ScoreVector("pagerank", s.year, {})
        vectors.append(vector)
    if "hits" in selected:
        hub, authority, report = hits(s, tol=run.args.tol, max_iter=run.args.max_iter)
        vectors.extend([hub, authority])
        iteration_info["hits"] = report
    if "betweenness" in selected:
        vectors.append(betweenness(s))
    if "clustering" in selected:
        vectors.append(clustering_vector(s))
    if "reciprocity" in selected:
        vectors.append(reciprocity_vector(s, run.args.reciprocity_variant))
    return vectors, iteration_info


def _metric_outputs(run: Run, selected) -> list:
    """Compute vectors for all years, write per-metric artifacts, return vectors."""
    slices = {y: run.slice_for(y) for y in run.years}
    results = run.map_years(lambda y: _year_vectors(run, slices[y], selected))

    all_vectors = []
    iteration_meta: dict[str, dict[str, dict]] = {}
    for year, (vectors, iteration_info) in zip(run.years, results):
        all_vectors.extend(vectors)
        for name, report in iteration_info.items():
            iteration_meta.setdefault(name, {})[str(year)] = {
                "iterations": report.iterations,
                "final_delta": report.final_delta,
                "converged": report.converged,
            }
            if not report.converged and not run.args.allow_nonconverged:
                run.errors.append(
                    f"{name} did not converge for year {year} "
                    f"(final delta {report.final_delta:.3e})"
                )

    strengths = {y: strength_vector(slices[y], "out") for y in run.years}
    for vector in all_vectors:
        run.write(f"choropleth_{vector.name}_{vector.year}.csv", choropleth_csv(vector))
        tiebreak = strengths[vector.year] if vector.name == "drain_index" else None
        ranking = rank(vector, "desc", tiebreak)
        run.write(f"ranking_{vector.name}_{vector.year}.csv", ranking_csv(ranking.entries))

    meta = dict(run.meta)
    meta.update(
        {
            "metrics": list(selected),
            "damping": run.args.damping,
            "tol": run.args.tol,
            "max_iter": run.args.max_iter,
            "reciprocity_variant": run.args.reciprocity_variant,
            "restrict_scc": bool(run.args.restrict_scc),
            "iterations": iteration_meta,
        }
    )
    run.write("scores.json", scores_json(all_vectors, meta))
    return all_vectors


def cmd_metrics(args) -> int:
    run = Run(args)
    _metric_outputs(run, _selected_metrics(args))
    print(f"wrote {len(run.files)} files to {run.out_dir}")
    return run.finish()


# ---------------------------------------------------------------------------
# null
# ---------------------------------------------------------------------------

def _curve_payload(curve) -> dict:
    return {
        "x": list(curve.x),
        "mean": list(curve.mean),
        "ci95": list(curve.ci95),
        "source": curve.source,
    }


def _null_outputs(run: Run) -> None:
    tol, max_iter = run.args.tol, run.args.max_iter

    def year_ensemble(year):
        s = run.slice_for(year)
        if len(s.weights) == 0:
            return s, None
        try:
            return s, ensemble(s, run.args.ensemble_size, (run.args.seed, year))
        except InfeasibleSliceError as exc:
            run.soft_errors.append(str(exc))
            return s, None

    pairs = run.map_years(year_ensemble)

    real_corr: dict[str, float | None] = {}
    null_mean: dict[str, float | None] = {}
    null_ci: dict[str, float | None] = {}
    real_slices = []
    null_slices = []
    for year, (s, ens) in zip(run.years, pairs):
        real_slices.append(s)
        hub, authority, _ = hits(s, tol=tol, max_iter=max_iter)
        r = pearson(hub, authority)
        real_corr[str(year)] = r if is_defined(r) else None
        if ens is None:
            null_mean[str(year)] = None
            null_ci[str(year)] = None
            continue
        null_slices.extend(ens.realizations)

        def hub_auth_corr(realization):
            h, a, _ = hits(realization, tol=tol, max_iter=max_iter)
            return pearson(h, a)

        mean, ci = ensemble_statistic(ens, hub_auth_corr)
        null_mean[str(year)] = mean if is_defined(mean) else None
        null_ci[str(year)] = ci if ci is None or is_defined(ci) else None

    curves = {}
    for score in ("hub", "authority"):
        gini_real = rank_conditioned_gini(
            real_slices, score, tol=tol, max_iter=max_iter, source="real-network"
        )
        cc_real = rank_conditioned_neighbor_cc(
            real_slices, score, tol=tol, max_iter=max_iter, source="real-network"
        )
        gini_null = rank_conditioned_gini(
            null_slices, score, tol=tol, max_iter=max_iter, source="null-ensemble"
        )
        cc_null = rank_conditioned_neighbor_cc(
            null_slices, score, tol=tol, max_iter=max_iter, source="null-ensemble"
        )
        curves[f"gini_{score}"] = {
            "real": _curve_payload(gini_real),
            "null": _curve_payload(gini_null),
        }
        curves[f"neighbor_cc_{score}"] = {
            "real": _curve_payload(cc_real),
            "null": _curve_payload(cc_null),
        }

    meta = dict(run.meta)
    meta.update(
        {
            "seed": run.args.seed,
            "ensemble_size": run.args.ensemble_size,
            "tol": tol,
            "max_iter": max_iter,
            "seed_rule": "realization k of year y uses PCG64(SeedSequence((seed, y, k)))",
        }
    )
    document = {
        "meta": meta,
        "hub_authority_correlation": {
            "real": real_corr,
            "null_mean": null_mean,
            "null_ci95": null_ci,
        },
        "curves": curves,
    }
    run.write("null_stats.json", canonical_json(document))


def cmd_null(args) -> int:
    run = Run(args)
    _null_outputs(run)
    print(f"wrote {len(run.files)} files to {run.out_dir}")
    return run.finish()


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _pivot_year(run: Run) -> int:
    if run.args.pivot_year is not None:
        if run.args.pivot_year not in run.years:
            raise CliError(f"pivot year {run.args.pivot_year} not among analysis years")
        return run.args.pivot_year
    return 2014 if 2014 in run.years else run.years[-1]


def _ranking_payload(ranking) -> list:
    return [[pos, str(node), score] for pos, node, score in ranking.entries]


def _report_outputs(run: Run) -> None:
    selected = _selected_metrics(run.args)
    _metric_outputs(run, selected)
    _null_outputs(run)
    pivot = _pivot_year(run)
    tol, max_iter = run.args.tol, run.args.max_iter

    steps = threshold_sensitivity(
        run.net,
        pivot,
        drain_index_vector,
        _parse_thresholds(run.args.thresholds),
        tiebreak=lambda s: strength_vector(s, "out"),
    )
    run.write(
        "threshold_sensitivity.json",
        canonical_json(
            {
                "meta": dict(run.meta),
                "year": pivot,
                "metric": "drain_index",
                "steps": [
                    {
                        "tr": step.tr,
                        "retained_fraction": step.retained_fraction,
                        "ranking": _ranking_payload(step.ranking),
                    }
                    for step in steps
                ],
            }
        ),
    )

    classes_doc = {}
    for score in ("hub", "authority"):
        summaries, warnings = lorenz_by_class(
            run.net, pivot, score, roster=run.args.roster, tol=tol, max_iter=max_iter
        )
        for message in warnings:
            print(f"warning: lorenz {score}: {message}", file=sys.stderr)
        classes_doc[score] = [
            {
                "class": summary.label,
                "members": [str(m) for m in summary.members],
                "grid": list(summary.grid),
                "mean": list(summary.mean),
                "ci95": list(summary.ci95),
            }
            for summary in summaries
        ]
    run.write(
        "lorenz_classes.json",
        canonical_json({"meta": dict(run.meta), "year": pivot, "classes": classes_doc}),
    )

    reciprocity_doc = {}
    for score in ("hub", "authority"):
        series = reciprocity_timeseries(
            run.slices(),
            top_k=run.args.top_k,
            score=score,
            variant=run.args.reciprocity_variant,
        )
        reciprocity_doc[score] = {
            "years": list(series.years),
            "network": [v if is_defined(v) else None for v in series.network],
            "top_mean": [v if is_defined(v) else None for v in series.top_mean],
            "variant": series.variant,
            "top_k": series.top_k,
        }
    run.write(
        "reciprocity.json",
        canonical_json({"meta": dict(run.meta), "series": reciprocity_doc}),
    )

    pivot_slice = run.slice_for(pivot)
    hub, authority, _ = hits(pivot_slice, tol=tol, max_iter=max_iter)
    focus = sorted(
        {node for _, node, _ in rank(hub, "desc").entries[:20]}
        | {node for _, node, _ in rank(authority, "desc").entries[:20]}
    )
    trajectory_doc = {
        str(t.country): {
            "points": [[year, cb, cc] for year, cb, cc in t.points],
            "skipped_years": list(t.skipped_years),
        }
        for t in trajectories(run.net, focus, roster=run.args.roster)
    }
    run.write(
        "trajectories.json",
        canonical_json(
            {"meta": dict(run.meta), "pivot_year": pivot, "countries": trajectory_doc}
        ),
    )

    manifest = {"files": dict(sorted(run.files.items()))}
    run.write("manifest.json", canonical_json(manifest))


def cmd_report(args) -> int:
    run = Run(args)
    _report_outputs(run)
    print(f"wrote {len(run.files)} files to {run.out_dir}")
    return run.finish()


# ---------------------------------------------------------------------------
# ego
# ---------------------------------------------------------------------------

def cmd_ego(args) -> int:
    run = Run(args)
    country = args.country.strip().upper()
    if country not in run.net.nodes:
        raise CliError(f"unknown country {country!r}")
    directions = {
        "in": ["incoming"],
        "out": ["outgoing"],
        "both": ["incoming", "outgoing"],
    }[args.direction]
    for year in run.years:
        s = run.slice_for(year)
        for direction in directions:
            ego = ego_network(s, country, direction)
            suffix = "in" if direction == "incoming" else "out"
            run.write(f"ego_{country}_{year}_{suffix}.dot", to_dot(ego))
    print(f"wrote {len(run.files)} files to {run.out_dir}")
    return run.finish()


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flownet",
        description="Temporal weighted directed network analytics for migration flows.",
        epilog=(
            f"Reproducibility: --seed defaults to the fixed constant {DEFAULT_SEED}; "
            "realization k of the year-y null ensemble is drawn from "
            "PCG64(SeedSequence((seed, y, k))). FLOWNET_OUT sets the default "
            "output directory; FLOWNET_BACKEND=numpy disables the numba kernels."
        ),
    )
    parser.add_argument("--version", action="version", version=f"flownet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="events CSV (origin,destination,year,count)")
    common.add_argument("--out-dir", default=_default_out_dir(), help="output directory")
    common.add_argument("--years", default=DEFAULT_YEARS, help="A..B range, year, or comma list")
    common.add_argument(
        "--roster",
        choices=("global", "per-year"),
        default="global",
        help="score over the full node roster or only each year's active nodes",
    )
    common.add_argument("--jobs", type=int, default=1, help="concurrent per-year workers")
    common.add_argument("--strict", action="store_true", help="any component error fails the run")

    metricish = argparse.ArgumentParser(add_help=False)
    metricish.add_argument("--metrics", default="", help=f"comma list from: {','.join(ALL_METRICS)}")
    metricish.add_argument("--damping", type=float, default=0.85, help="PageRank damping factor")
    metricish.add_argument("--tol", type=float, default=1e-10, help="L1 convergence tolerance")
    metricish.add_argument("--max-iter", type=int, default=1000, help="power iteration cap")
    metricish.add_argument(
        "--reciprocity-variant",
        choices=("paper", "normalized"),
        default="paper",
        help="keep the published factor 2 or normalize node reciprocity into [0,1]",
    )
    metricish.add_argument(
        "--restrict-scc",
        action="store_true",
        help="restrict every slice to its largest strongly connected component",
    )
    metricish.add_argument(
        "--allow-nonconverged",
        action="store_true",
        help="do not fail when an iteration hits --max-iter",
    )

    nullish = argparse.ArgumentParser(add_help=False)
    nullish.add_argument("--ensemble-size", type=int, default=10, help="null realizations per year")
    nullish.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base RNG seed")

    p_ingest = sub.add_parser("ingest", help="normalize an event or affiliation file")
    p_ingest.add_argument("--input", required=True)
    p_ingest.add_argument("--output", default=None, help="canonical events CSV path")
    p_ingest.add_argument("--strict", action="store_true")
    p_ingest.set_defaults(func=cmd_ingest)

    p_metrics = sub.add_parser(
        "metrics", parents=[common, metricish], help="per-year score vectors and rankings"
    )
    p_metrics.set_defaults(func=cmd_metrics)

    p_null = sub.add_parser(
        "null",
        parents=[common, metricish, nullish],
        help="strength-preserving null ensembles and comparison statistics",
    )
    p_null.set_defaults(func=cmd_null)

    p_report = sub.add_parser(
        "report",
        parents=[common, metricish, nullish],
        help="full analysis bundle with manifest",
    )
    p_report.add_argument("--thresholds", default="1,2,3,4,5,6,7,8,9,10", help="comma list of lift thresholds")
    p_report.add_argument("--top-k", type=int, default=10, help="top ranks for the reciprocity series")
    p_report.add_argument("--pivot-year", type=int, default=None, help="year for single-year analyses (default 2014 when analyzed, else the last year)")
    p_report.set_defaults(func=cmd_report)

    p_ego = sub.add_parser("ego", parents=[common], help="ego-network DOT exports")
    p_ego.add_argument("--country", required=True)
    p_ego.add_argument("--direction", choices=("in", "out", "both"), default="both")
    p_ego.set_defaults(func=cmd_ego)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
