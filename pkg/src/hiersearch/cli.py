"""Command-line front end.

Exit codes: 0 on success, 1 when the input fails validation or a run
errors out, 2 for usage mistakes.  Tabular output is CSV by default;
--pretty switches to aligned columns.  All randomness flows through
explicit seeds, so repeating a command reproduces its output exactly.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from . import datasets, evaluation
from .distributions import (
    DISTRIBUTION_KINDS,
    DistributionSpec,
    generate,
    parse_cost_file,
    zero_synthetic_root,
)
from .dtree import build_decision_tree, to_dot
from .errors import HierSearchError
from .evaluation import batch_evaluate, css_curve, replay_strategy, rows_to_csv, runtime_probe
from .generators import random_dag, random_tree, sample_targets
from .hierarchy import ensure_single_root, load_hierarchy
from .policies import POLICY_KINDS


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except HierSearchError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(1)


@click.group(cls=_Group)
def main():
    """Interactive search over category hierarchies."""


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _load(path: str):
    return ensure_single_root(load_hierarchy(_read(path)))


def _weights_for(h, weights_path, dist, zipf_a, seed):
    if weights_path and dist:
        raise click.UsageError("--weights and --dist are mutually exclusive")
    if weights_path:
        spec = DistributionSpec("file", text=_read(weights_path))
    else:
        kind = dist or "equal"
        if kind in ("uniform", "exponential", "zipf") and seed is None:
            raise click.UsageError(f"--dist {kind} requires --seed")
        spec = DistributionSpec(kind, a=zipf_a if kind == "zipf" else None,
                                seed=seed)
    return zero_synthetic_root(generate(spec, h.labels), h)


def _emit(header, rows, pretty):
    if not pretty:
        click.echo(rows_to_csv(header, rows), nl=False)
        return
    table = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    for r in table:
        click.echo("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())


_hierarchy_arg = click.argument("hierarchy_path", type=click.Path(exists=True, dir_okay=False))
_weights_opt = click.option("--weights", "weights_path", type=click.Path(exists=True, dir_okay=False),
                            default=None, help="node<TAB>weight file")
_dist_opt = click.option("--dist", type=click.Choice([k for k in DISTRIBUTION_KINDS if k != "file"]),
                         default=None, help="synthetic distribution")
_zipf_opt = click.option("--zipf-a", type=float, default=2.0, show_default=True,
                         help="Zipf shape parameter")
_seed_opt = click.option("--seed", type=int, default=None, help="RNG seed")
_costs_opt = click.option("--costs", "costs_path", type=click.Path(exists=True, dir_okay=False),
                          default=None, help="node<TAB>cost file")
_pretty_opt = click.option("--pretty", is_flag=True, help="aligned columns instead of CSV")


@main.command()
@_hierarchy_arg
def validate(hierarchy_path):
    """Check an edge-list file; print its shape summary."""
    h = load_hierarchy(_read(hierarchy_path))
    st = h.stats()
    roots = len(h.roots)
    click.echo(f"n={st.n} m={st.m} height={st.height} "
               f"max_out_degree={st.max_out_degree} "
               f"tree={'yes' if st.is_tree else 'no'} roots={roots}")


@main.command()
@_hierarchy_arg
@_pretty_opt
def stats(hierarchy_path, pretty):
    """Shape statistics of a hierarchy file."""
    h = _load(hierarchy_path)
    st = h.stats()
    rows = [[k, v] for k, v in st.as_dict().items()]
    _emit(["key", "value"], rows, pretty)


@main.command()
@click.option("--hierarchy", "hierarchy_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="edge-list file")
@click.option("--policy", type=click.Choice(POLICY_KINDS), default="greedy_tree",
              show_default=True)
@_weights_opt
@_dist_opt
@_zipf_opt
@_seed_opt
@_costs_opt
@click.option("--targets", default="all", show_default=True,
              help="'all' or 'sample:K' drawn from the distribution")
@click.option("--rounded", is_flag=True, help="use integer surrogate weights")
@click.option("--golden", type=click.Choice(["example2"]), default=None,
              help="replay the built-in labeled-images comparison")
@_pretty_opt
def simulate(hierarchy_path, policy, weights_path, dist, zipf_a, seed,
             costs_path, targets, rounded, golden, pretty):
    """Run searches against a simulated truthful answerer."""
    if golden == "example2":
        _golden_example2(pretty)
        return
    if hierarchy_path is None:
        raise click.UsageError("--hierarchy is required (or use --golden)")
    h = _load(hierarchy_path)
    p = _weights_for(h, weights_path, dist, zipf_a, seed)
    costs = parse_cost_file(_read(costs_path), h.labels) if costs_path else None
    if targets == "all":
        target_list = None
    elif targets.startswith("sample:"):
        if seed is None:
            raise click.UsageError("--targets sample:K requires --seed")
        k = int(targets.split(":", 1)[1])
        target_list = sample_targets(p, k, np.random.default_rng(seed)).tolist()
    else:
        raise click.UsageError(f"bad --targets value {targets!r}")
    report = batch_evaluate(h, p, policy, targets=target_list, costs=costs,
                            rounded=rounded or None)
    rows = [[h.labels[t], q, f"{pr:g}"]
            for t, q, pr in zip(report.targets, report.per_target_questions,
                                report.per_target_price)]
    if report.expected_cost is not None:
        rows.append(["expected", f"{report.expected_cost:g}",
                     f"{report.expected_price:g}"])
    else:
        rows.append(["mean", f"{report.mean_questions:g}", ""])
    _emit(["target", "questions", "price"], rows, pretty)


def _golden_example2(pretty):
    h = datasets.vehicle()
    p = datasets.vehicle_real_weights(h)
    rows = []
    for name, priority in (("broad_first", datasets.VEHICLE_STRATEGY_BROAD),
                           ("leaf_first", datasets.VEHICLE_STRATEGY_LEAF)):
        per_cat, total = replay_strategy(h, p, priority, datasets.VEHICLE_COUNTS)
        objects = 0
        for lab in h.labels:
            cnt = datasets.VEHICLE_COUNTS[lab]
            rows.append([name, lab, cnt, per_cat[lab], cnt * per_cat[lab]])
            objects += cnt
        rows.append([name, "TOTAL", objects, "", total])
    _emit(["strategy", "category", "objects", "questions_per_object",
           "questions_total"], rows, pretty)


@main.command()
@click.option("--hierarchy", "hierarchy_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--policies", default="top_down,greedy_tree", show_default=True,
              help="comma-separated policy kinds")
@click.option("--dists", default="equal", show_default=True,
              help="comma-separated distribution kinds")
@_zipf_opt
@_seed_opt
@_costs_opt
@_weights_opt
@_pretty_opt
def evaluate(hierarchy_path, policies, dists, zipf_a, seed, costs_path,
             weights_path, pretty):
    """Expected-cost table: one row per policy and distribution."""
    h = _load(hierarchy_path)
    costs = parse_cost_file(_read(costs_path), h.labels) if costs_path else None
    rows = []
    for dist in dists.split(","):
        dist = dist.strip()
        if weights_path and dist != "file":
            raise click.UsageError("--weights only combines with --dists file")
        p = _weights_for(h, weights_path if dist == "file" else None,
                         None if dist == "file" else dist, zipf_a, seed)
        for kind in policies.split(","):
            kind = kind.strip()
            report = batch_evaluate(h, p, kind, costs=costs)
            row = [kind, dist, f"{report.expected_cost:.6g}"]
            row.append(f"{report.expected_price:.6g}" if costs is not None else "")
            rows.append(row)
    _emit(["policy", "distribution", "expected_questions", "expected_price"],
          rows, pretty)


@main.command()
@click.option("--hierarchy", "hierarchy_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", type=click.Choice(POLICY_KINDS), default="greedy_tree",
              show_default=True)
@_weights_opt
@_dist_opt
@_zipf_opt
@_seed_opt
@_pretty_opt
def css(hierarchy_path, policy, weights_path, dist, zipf_a, seed, pretty):
    """Candidate-set shrink curve averaged over all targets."""
    h = _load(hierarchy_path)
    p = _weights_for(h, weights_path, dist, zipf_a, seed)
    curve = css_curve(h, p, policy)
    rows = [[k, f"{v:.6g}"] for k, v in curve]
    _emit(["questions", "mean_live"], rows, pretty)


@main.command()
@click.option("--shape", type=click.Choice(["tree", "dag"]), default="tree",
              show_default=True)
@click.option("--sizes", default="1000,10000", show_default=True,
              help="comma-separated node counts")
@click.option("--policies", default="greedy_naive,greedy_tree", show_default=True)
@click.option("--dist", type=click.Choice([k for k in DISTRIBUTION_KINDS if k != "file"]),
              default="uniform", show_default=True)
@_zipf_opt
@click.option("--seed", type=int, required=True, help="RNG seed")
@click.option("--targets-per-depth", type=int, default=2, show_default=True)
@click.option("--repetitions", type=int, default=5, show_default=True)
@_pretty_opt
def bench(shape, sizes, policies, dist, zipf_a, seed, targets_per_depth,
          repetitions, pretty):
    """Wall-time probe over random hierarchies of growing size."""
    rows = []
    kinds = [k.strip() for k in policies.split(",")]
    for size in (int(s) for s in sizes.split(",")):
        rng = np.random.default_rng(seed)
        h = (random_tree(size, rng, max_children=5) if shape == "tree"
             else random_dag(size, rng, max_children=5))
        spec = DistributionSpec(dist, a=zipf_a if dist == "zipf" else None,
                                seed=None if dist == "equal" else seed)
        p = generate(spec, h.labels)
        probe = runtime_probe(h, p, kinds, targets_per_depth=targets_per_depth,
                              repetitions=repetitions,
                              rng=np.random.default_rng(seed + 1))
        for kind in kinds:
            rows.append([kind, size, f"{probe.mean_seconds(kind):.6g}"])
    _emit(["policy", "n", "mean_seconds"], rows, pretty)


@main.command("export-dtree")
@click.option("--hierarchy", "hierarchy_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", type=click.Choice(POLICY_KINDS), default="greedy_tree",
              show_default=True)
@_weights_opt
@_dist_opt
@_zipf_opt
@_seed_opt
@_costs_opt
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="write DOT here instead of stdout")
def export_dtree(hierarchy_path, policy, weights_path, dist, zipf_a, seed,
                 costs_path, out_path):
    """Expand a policy into its decision tree and emit Graphviz DOT."""
    h = _load(hierarchy_path)
    p = _weights_for(h, weights_path, dist, zipf_a, seed)
    costs = parse_cost_file(_read(costs_path), h.labels) if costs_path else None
    tree = build_decision_tree(h, p, policy, costs=costs)
    dot = to_dot(tree, h.labels)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(dot + "\n")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(dot)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="persist sessions under this directory")
@click.option("--ttl", type=float, default=3600.0, show_default=True,
              help="seconds before an idle session is abandoned")
@click.option("--rolling-window", type=int, default=50, show_default=True,
              help="resolved sessions in the rolling mean")
def serve(host, port, data_dir, ttl, rolling_window):
    """Run the labeling session service over HTTP."""
    from .server import run_server
    from .service import SessionService

    service = SessionService(data_dir=data_dir, ttl_seconds=ttl,
                             rolling_window=rolling_window)
    click.echo(f"serving on http://{host}:{port}", err=True)
    run_server(service, host=host, port=port)


if __name__ == "__main__":
    main()
