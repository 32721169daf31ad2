"""Command-line drivers: summarize, embed, and sweep runs.

Every command takes a JSON config (see the config module), an output
directory, and repeatable `--override key=value` tweaks. Failures exit
nonzero with a one-line diagnostic naming the pipeline stage that broke.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

from . import config as config_mod
from . import geo, ingest, layers, sequence, spectral
from .config import RunConfig
from .errors import ConfigError
from .fileio import atomic_write


class StageFailure(Exception):
    """Wraps any pipeline error with the name of the stage it came from."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageFailure:
        raise
    except Exception as exc:
        raise StageFailure(name, exc) from exc


def _load_events(cfg: RunConfig):
    with open(cfg.events_csv, encoding="utf-8", newline="") as fh:
        events, report = ingest.parse_events(fh, cfg.column_map)
    violent = ingest.filter_violent(events, cfg.categories)
    if cfg.split_rules:
        violent = sequence.split_groups(violent, cfg.split_rules)
    return violent, report


def _border_graph(cfg: RunConfig) -> geo.CountryBorderGraph:
    if cfg.borders_csv:
        return geo.CountryBorderGraph.load_csv(cfg.borders_csv)
    return geo.load_reference_borders()


def cmd_summarize(cfg: RunConfig, out_dir: Path) -> int:
    """Write the summary tables and print the headline totals."""
    with _stage("ingest"):
        violent, report = _load_events(cfg)
        if violent:
            locations, mapping = ingest.build_locations(violent, cfg.rounding)
            stats = ingest.summarize(violent, locations, mapping)
        else:
            stats = ingest.SummaryStats((), (), {}, ingest.Totals(0, 0, 0))
    with _stage("export"):
        out_dir.mkdir(parents=True, exist_ok=True)
        ingest.write_summary_csvs(stats, out_dir)
        ingest.write_rejections_csv(report, out_dir / "rejections.csv")
    totals = stats.totals
    print(f"events={totals.events} groups={totals.groups} locations={totals.locations}")
    if stats.attacks_per_location:
        mean = totals.events / totals.locations
        peak = max(stats.attacks_per_location)
    else:
        mean, peak = 0.0, 0
    print(f"attacks_per_location mean={float(mean)!r} max={peak}")
    return 0


def _embed_pipeline(cfg: RunConfig):
    """Shared ingest-to-embedding path; returns (emb, disp, locations, report)."""
    with _stage("ingest"):
        violent, report = _load_events(cfg)
        if not violent:
            raise ValueError("no events left after filtering; nothing to embed")
        locations, mapping = ingest.build_locations(violent, cfg.rounding)

    model = cfg.border_model
    crossings = None
    with _stage("borders"):
        if not (cfg.pipeline == "geo" and model.kind == "none"):
            cg = _border_graph(cfg)
            crossings = geo.crossings_matrix(locations, cg)

    with _stage("assembly"):
        n = len(locations)
        pair = None
        if cfg.pipeline == "geo":
            if model.kind == "permeability":
                weights = geo.border_permeability_matrix(crossings, model.p)
                tag = "border"
            else:
                distances = geo.distance_matrix(locations)
                if model.kind == "linear":
                    distances = geo.linear_border_distances(
                        distances, crossings, model.cost_km
                    )
                weights = geo.invert_distances(distances)
                tag = "distance"
            system_matrix = weights
            provenance = [spectral.PointRef(i, tag, layers.NO_COPY) for i in range(n)]
        elif cfg.pipeline == "two_layer":
            w_dist = geo.invert_distances(geo.distance_matrix(locations))
            w_border = geo.border_permeability_matrix(crossings, model.p)
            system = layers.build_two_layer(w_dist, w_border, layers.TWO_LAYER_TAGS)
            system_matrix, provenance = system.assembled, system.provenance
            pair = layers.TWO_LAYER_TAGS
        else:
            location_of = {e.source_row: lid for e, lid in zip(violent, mapping)}
            seq = sequence.sequence_adjacency(violent, location_of, cfg.groups, n)
            w_border = geo.border_permeability_matrix(crossings, model.p)
            w_dist = geo.invert_distances(geo.distance_matrix(locations))
            system = layers.build_three_layer(w_border, w_dist, seq)
            system_matrix, provenance = system.assembled, system.provenance
            pair = ("distance", "border")

    with _stage("solver"):
        emb = spectral.embed(system_matrix, cfg.k, provenance=provenance)
        disp = layers.displacement(emb, pair) if pair else None
    return emb, disp, locations, report


def _export_run(cfg, emb, disp, locations, report, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    countries = {loc.id: loc.country for loc in locations}
    spectral.write_embedding_csv(emb, out_dir / "embedding.csv", countries)
    spectral.write_eigenvalues_csv(emb, out_dir / "eigenvalues.csv")
    if disp is not None:
        layers.write_displacement_csv(disp, out_dir / "displacement.csv", countries)
    ingest.write_rejections_csv(report, out_dir / "rejections.csv")
    config_mod.write_manifest(cfg, "embed", out_dir / "manifest.json")


def cmd_embed(cfg: RunConfig, out_dir: Path) -> int:
    """One embedding run: coordinates, eigenvalues, manifest, diagnostics."""
    emb, disp, locations, report = _embed_pipeline(cfg)
    with _stage("export"):
        _export_run(cfg, emb, disp, locations, report, out_dir)
    return 0


def _sweep_label(cfg: RunConfig, value: float) -> str:
    prefix = "cost_" if cfg.border_model.kind == "linear" else "p_"
    return prefix + repr(float(value))


def cmd_sweep(cfg: RunConfig, out_dir: Path) -> int:
    """Re-run the embedding at each swept border value and tabulate ratios."""
    with _stage("config"):
        values = cfg.sweep_values()
        if not values:
            raise ConfigError("sweep list is empty")
    ratios = []
    failed = 0
    for value in values:
        try:
            with _stage("config"):
                sub = cfg.with_border_value(value)
            emb, disp, locations, report = _embed_pipeline(sub)
            with _stage("export"):
                _export_run(sub, emb, disp, locations, report, out_dir / _sweep_label(cfg, value))
            countries = {loc.id: loc.country for loc in locations}
            ratios.append((value, layers.country_separation_ratio(emb, countries)))
        except StageFailure as exc:
            failed += 1
            print(f"sweep value {value!r} failed; {exc}", file=sys.stderr)
    with _stage("export"):
        out_dir.mkdir(parents=True, exist_ok=True)
        with atomic_write(out_dir / "separation_ratios.csv") as fh:
            fh.write("value,separation_ratio\n")
            for value, ratio in ratios:
                fh.write(f"{float(value)!r},{float(ratio)!r}\n")
    return 1 if failed else 0


_COMMANDS = {
    "summarize": cmd_summarize,
    "embed": cmd_embed,
    "sweep": cmd_sweep,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permap",
        description="Location-network embeddings from geocoded event data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "summarize": "parse events and write per-location summary tables",
        "embed": "run one embedding and export coordinate CSVs",
        "sweep": "run an embedding per border-model value and tabulate separation",
    }
    for name, text in helps.items():
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=True, help="path to a run config JSON")
        cmd.add_argument("--out", help="output directory (falls back to config output_dir)")
        cmd.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry; dotted keys reach nested fields",
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with _stage("config"):
            cfg = config_mod.load_config(args.config, args.override)
            out_dir = args.out or cfg.output_dir
            if not out_dir:
                raise ConfigError("no output directory: pass --out or set output_dir")
        return _COMMANDS[args.command](cfg, Path(out_dir))
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
