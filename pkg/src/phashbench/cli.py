"""Command-line entry point: ``phashbench <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 golden-vector failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .errors import DataError, MissingHashes, PhashbenchError
from .hashalgos import ALGORITHMS
from .modpipeline import MODIFICATIONS

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_GOLDEN = 0, 1, 2, 3
DEFAULT_OUT = "phashbench-run"


class UsageError(PhashbenchError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(choices, allow_none=False):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if allow_none and items == ["none"]:
            return []
        bad = [t for t in items if t not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(
                f"unknown value(s) {', '.join(bad) or repr(text)}; supported: {', '.join(choices)}")
        return sorted(set(items), key=list(choices).index)
    return parse


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--corpus", type=Path, help="directory of JPEG/PNG images (searched recursively)")
    p.add_argument("--out", type=Path, default=Path(DEFAULT_OUT), help="run directory (default: %(default)s)")
    p.add_argument("--seed", type=int, default=20221207, help="sampling seed (default: %(default)s)")
    p.add_argument("--k", type=int, default=50, help="random partners per image (default: %(default)s)")
    p.add_argument("--algos", type=_csv_list(ALGORITHMS), default=list(ALGORITHMS),
                   help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--mods", type=_csv_list(MODIFICATIONS, allow_none=True), default=list(MODIFICATIONS),
                   help=f"comma-separated subset of {','.join(MODIFICATIONS)}, or 'none'")
    p.add_argument("--workers", type=int, default=1, help="worker processes for hashing (default: 1)")
    p.add_argument("--kernel", choices=("nearest", "bilinear", "bicubic", "box-area"),
                   help="resampling kernel for the scale and thumb96 attacks (default: bicubic)")
    p.add_argument("--dedup", action=argparse.BooleanOptionalAction, default=True,
                   help="collapse byte-identical files (default: on)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phashbench", description="Perceptual hash robustness benchmark.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-image failures")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()
    sub.add_parser("hash", parents=[common], help="hash the original images")
    sub.add_parser("modify", parents=[common], help="apply attacks, persist variants and hash them")
    sub.add_parser("inter", parents=[common], help="inter-score statistics (original + --mods variants)")
    sub.add_parser("intra", parents=[common], help="intra-score statistics per modification")
    sub.add_parser("report", parents=[common], help="consolidated report with index page")
    g = sub.add_parser("golden", parents=[common], help="check hashes against golden vectors")
    g.add_argument("--goldens", type=Path, default=Path("tests/fixtures/golden/goldens.json"),
                   help="golden vector JSON; fixtures sit beside it (default: %(default)s)")
    imp = sub.add_parser("import", parents=[common], help="merge externally computed hashes into the store")
    imp.add_argument("file", type=Path, help="TSV in hash-store format")
    c = sub.add_parser("corpus", parents=[common], help="cut the desk corpus from source photographs")
    c.add_argument("--sources", type=Path, default=Path("data/desk_sources"))
    c.add_argument("--count", type=int, default=2100, help="number of crops (default: %(default)s)")
    return parser


# -- helpers ----------------------------------------------------------------

def _require_corpus(args):
    if args.corpus is None:
        raise UsageError("--corpus is required for this command")
    from .harness import ingest_corpus
    return ingest_corpus(args.corpus, dedup=args.dedup)


def _manifest(args, index):
    from .harness import RunManifest
    overrides = {}
    if args.kernel:
        overrides = {"scale": {"kernel": args.kernel}, "thumb96": {"kernel": args.kernel}}
    return RunManifest(seed=args.seed, k_neighbours=args.k, algorithms=list(args.algos),
                       modifications=list(args.mods), corpus_digest=index.digest, n_images=len(index),
                       dedup=args.dedup, overrides={k: v for k, v in overrides.items() if k in args.mods})


def _store(args):
    from .harness import HashStore
    args.out.mkdir(parents=True, exist_ok=True)
    return HashStore(args.out / "hashes.tsv")


def _hash_variants(args, variants, persist):
    index = _require_corpus(args)
    manifest = _manifest(args, index)
    store = _store(args)
    manifest.save(args.out / "manifest.json")
    from .harness import hash_corpus
    for variant in variants:
        t0 = time.perf_counter()
        summary = hash_corpus(index, args.algos, variant, store, manifest=manifest, workers=args.workers,
                              persist_dir=(args.out / "variants") if persist else None)
        store.save()
        counts = ", ".join(f"{a}={n}" for a, n in summary.new_records.items())
        print(f"{variant}: {summary.total_new} new records ({counts}), "
              f"{len(summary.failures)} failures, {time.perf_counter() - t0:.1f}s")
    return EXIT_OK


# -- commands ---------------------------------------------------------------

def cmd_hash(args):
    return _hash_variants(args, ["original"], persist=False)


def cmd_modify(args):
    if not args.mods:
        raise UsageError("--mods none leaves nothing to modify")
    return _hash_variants(args, args.mods, persist=True)


def _experiment(args, kind):
    from .harness import run_inter, run_intra
    from .report import write_experiment
    index = _require_corpus(args)
    manifest = _manifest(args, index)
    store = _store(args)
    manifest.save(args.out / "manifest.json")
    variants = ["original"] + args.mods if kind == "inter" else args.mods
    if not variants:
        raise UsageError("--mods none leaves nothing to compare")
    try:
        for v in variants:
            result = (run_inter if kind == "inter" else run_intra)(store, index, manifest, v)
            write_experiment(args.out, result)
            for algo, st in result.stats().items():
                print(f"{kind} {v:12s} {algo:10s} n={st.n} mean={st.mean:.4f} "
                      f"stdev={st.stdev:.4f} exact={100 * st.exact_match_frac:.2f}%")
    except MissingHashes as exc:
        hint = "phashbench hash" if kind == "inter" and v == "original" else f"phashbench modify --mods {v}"
        raise MissingHashes(f"{exc}. Run `{hint} --corpus ... --out {args.out}` first") from None
    return EXIT_OK


def cmd_inter(args):
    return _experiment(args, "inter")


def cmd_intra(args):
    return _experiment(args, "intra")


def cmd_report(args):
    from .report import build_report
    mpath = args.out / "manifest.json"
    manifest_text = mpath.read_text() if mpath.exists() else ""
    rep = build_report(args.out, _store(args), manifest_text)
    print(f"report written to {rep / 'index.html'}")
    return EXIT_OK


def cmd_golden(args):
    from .goldens import check_goldens
    results = check_goldens(args.goldens, args.algos)
    bad = [r for r in results if not r.ok]
    for r in bad:
        print(f"FAIL {r.fixture} {r.algo}: {r.diff} > {r.limit}")
    for algo in sorted({r.algo for r in results}):
        mine = [r for r in results if r.algo == algo]
        print(f"{algo}: worst {max(r.diff for r in mine)}, band {mine[0].limit}")
    print(f"{len(results) - len(bad)}/{len(results)} within band")
    return EXIT_GOLDEN if bad else EXIT_OK


def cmd_import(args):
    from .harness import import_external_hashes
    store = _store(args)
    n = import_external_hashes(args.file, store)
    store.save()
    print(f"{n} new records")
    return EXIT_OK


def cmd_corpus(args):
    from .deskcorpus import build_desk_corpus
    plans = build_desk_corpus(args.sources, args.out, target=args.count, seed=args.seed)
    print(f"{len(plans)} images in {args.out}")
    return EXIT_OK


COMMANDS = {
    "hash": cmd_hash, "modify": cmd_modify, "inter": cmd_inter, "intra": cmd_intra,
    "report": cmd_report, "golden": cmd_golden, "import": cmd_import, "corpus": cmd_corpus,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR,
                        format="%(levelname)s %(message)s")
    if args.k < 1 or args.workers < 1:
        parser.error("--k and --workers must be positive")
    try:
        return COMMANDS[args.command](args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (PhashbenchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
