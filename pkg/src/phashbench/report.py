"""Files written for each experiment, and the consolidated report built from them.

Run directory layout::

    manifest.json  hashes.tsv  failures.tsv  variants/
    inter_<variant>.csv      intra_<mod>.csv
    hist_<kind>_<variant>_<algo>.csv / .svg
    report/index.html  report/summary_*.csv  report/equiv_<algo>.csv
    report/thresholds_<algo>.csv / .svg
"""
from __future__ import annotations

import csv
from html import escape
from pathlib import Path

from .errors import DegenerateSample, NothingToReport
from .harness import ORIGINAL, STATS_HEADER, VARIANTS, ExperimentResult, HashStore, stats_rows
from .metrics import (LatticeCounts, equivalence_classes, histogram_from_counts, lattice_thresholds,
                      threshold_rates)
from .plots import curves_svg, histogram_svg

HIST_HEADER = ["bitlen", "k", "distance", "count", "npdf"]
EQUIV_FLAG_FRAC = 0.001


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_csv(path: Path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_experiment(out_dir, result: ExperimentResult) -> list:
    """Stats CSV plus one histogram CSV/SVG pair per algorithm; returns the paths."""
    out_dir = Path(out_dir)
    stem = f"{result.kind}_{result.variant}"
    paths = [out_dir / f"{stem}.csv"]
    _write_csv(paths[0], STATS_HEADER, stats_rows(result))
    for algo, counts in sorted(result.counts.items()):
        L = counts.length
        try:
            series = histogram_from_counts(counts)
            ks = [round(c * L) for c in series.centres]
            rows = [[L, k, f"{k / L:.6f}", int(n), f"{p:.6f}"]
                    for k, n, p in zip(ks, series.counts, series.npdf)]
            npdf = series.npdf
        except DegenerateSample:
            # every distance identical: no spread, so no normal overlay
            ks = [int(k) for k in counts.counts.nonzero()[0]]
            rows = [[L, k, f"{k / L:.6f}", int(counts.counts[k]), ""] for k in ks]
            npdf = None
        base = out_dir / f"hist_{stem}_{algo}"
        _write_csv(base.with_suffix(".csv"), HIST_HEADER, rows)
        title = f"{algo}: {result.kind}-score, {result.variant}"
        base.with_suffix(".svg").write_text(histogram_svg(title, L, ks, [r[3] for r in rows], npdf))
        paths += [base.with_suffix(".csv"), base.with_suffix(".svg")]
    return paths


def read_lattice(path) -> LatticeCounts:
    rows = _read_csv(Path(path))
    L = int(rows[0]["bitlen"])
    counts = LatticeCounts(L)
    for r in rows:
        counts.counts[int(r["k"])] += int(r["count"])
    return counts


def _hist_path(out_dir: Path, kind: str, variant: str, algo: str) -> Path:
    return out_dir / f"hist_{kind}_{variant}_{algo}.csv"


def threshold_table(out_dir, algo: str, mods) -> tuple:
    """(header, rows): FPR from original inter-scores, FNR per modification."""
    out_dir = Path(out_dir)
    inter = read_lattice(_hist_path(out_dir, "inter", ORIGINAL, algo))
    ts = lattice_thresholds(inter.length)
    header = ["threshold", "fpr"]
    fpr, fnrs = None, []
    for mod in mods:
        intra = read_lattice(_hist_path(out_dir, "intra", mod, algo))
        rates = threshold_rates(inter.expand(), intra.expand(), ts)
        fpr = [r.false_positive_rate for r in rates]
        fnrs.append([r.false_negative_rate for r in rates])
        header.append(f"fnr_{mod}")
    columns = [fpr] + fnrs
    rows = [[f"{t:.6f}"] + [f"{c[i]:.6f}" for c in columns] for i, t in enumerate(ts)]
    return header, rows


def _present(out_dir: Path, kind: str) -> list:
    return [v for v in VARIANTS if (out_dir / f"{kind}_{v}.csv").exists()]


def build_report(out_dir, store: HashStore, manifest_text: str) -> Path:
    out_dir = Path(out_dir)
    inter_vs = _present(out_dir, "inter")
    intra_vs = _present(out_dir, "intra")
    if not inter_vs and not intra_vs:
        raise NothingToReport(f"no inter_*.csv or intra_*.csv in {out_dir}; run inter/intra first")
    rep = out_dir / "report"
    rep.mkdir(exist_ok=True)

    summaries = {}
    for kind, vs in (("inter", inter_vs), ("intra", intra_vs)):
        rows = [r for v in vs for r in _read_csv(out_dir / f"{kind}_{v}.csv")]
        rows.sort(key=lambda r: (r["algo"], VARIANTS.index(r["modification"])))
        _write_csv(rep / f"summary_{kind}.csv", STATS_HEADER, [[r[c] for c in STATS_HEADER] for r in rows])
        summaries[kind] = rows

    # equivalence classes over the hashed originals
    equiv = {}
    for algo in store.algorithms():
        hashes = [(r.image_id, r.bithash()) for r in store.records()
                  if r.variant == ORIGINAL and r.algo == algo]
        if not hashes:
            continue
        report = equivalence_classes(hashes)
        flag_at = EQUIV_FLAG_FRAC * report.n_images
        _write_csv(rep / f"equiv_{algo}.csv", ["rank", "size", "flagged", "sample_members"],
                   [[i + 1, len(c), int(len(c) > flag_at), " ".join(c[:5])]
                    for i, c in enumerate(report.classes) if len(c) > 1])
        equiv[algo] = (report, flag_at)

    thresholds = []
    mods = [m for m in intra_vs if m != ORIGINAL]
    if ORIGINAL in inter_vs and mods:
        algos = sorted({r["algo"] for r in summaries["inter"]})
        for algo in algos:
            header, rows = threshold_table(out_dir, algo, mods)
            _write_csv(rep / f"thresholds_{algo}.csv", header, rows)
            x = [float(r[0]) for r in rows]
            series = {h.replace("fnr_", "FNR ").replace("fpr", "FPR"): [float(r[i]) for r in rows]
                      for i, h in enumerate(header) if i > 0}
            (rep / f"thresholds_{algo}.svg").write_text(curves_svg(f"{algo}: error rates by threshold", x, series))
            thresholds.append(algo)

    (rep / "index.html").write_text(_index_html(summaries, equiv, thresholds, manifest_text))
    return rep


def _table(rows: list) -> str:
    head = "".join(f"<th>{escape(c)}</th>" for c in STATS_HEADER)
    body = "".join("<tr>" + "".join(f"<td>{escape(r[c])}</td>" for c in STATS_HEADER) + "</tr>" for r in rows)
    return f"<table><tr>{head}</tr>{body}</table>"


def _index_html(summaries, equiv, thresholds, manifest_text) -> str:
    parts = ["<!DOCTYPE html>", '<html><head><meta charset="utf-8"><title>phashbench report</title>',
             "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}"
             "td,th{border:1px solid #ccc;padding:2px 8px;text-align:right}.flag{color:#b00}</style>",
             "</head><body>", "<h1>phashbench report</h1>"]
    if summaries.get("inter"):
        parts += ["<h2>Inter-score (unrelated pairs)</h2>", _table(summaries["inter"])]
    if summaries.get("intra"):
        parts += ["<h2>Intra-score (original vs modified)</h2>", _table(summaries["intra"])]
    if equiv:
        parts.append("<h2>Equivalence classes (identical hashes, originals)</h2><ul>")
        for algo, (rep, flag_at) in sorted(equiv.items()):
            big = [c for c in rep.classes if len(c) > flag_at]
            note = (f'<span class="flag">{len(big)} class(es) above 0.1% of the corpus, '
                    f'largest {rep.sizes[0]}</span>' if big else f"largest class {rep.sizes[0]}")
            parts.append(f'<li>{escape(algo)}: {note} (<a href="equiv_{algo}.csv">equiv_{algo}.csv</a>)</li>')
        parts.append("</ul>")
    if thresholds:
        parts.append("<h2>False positive and false negative rates</h2>")
        for algo in thresholds:
            parts.append(f'<p><img src="thresholds_{algo}.svg" alt="{algo} rates"> '
                         f'<a href="thresholds_{algo}.csv">thresholds_{algo}.csv</a></p>')
    parts += ["<h2>Manifest</h2>", f"<pre>{escape(manifest_text, quote=False)}</pre>", "</body></html>"]
    return "\n".join(parts) + "\n"
