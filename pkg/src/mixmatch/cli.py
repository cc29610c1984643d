"""Command-line interface.

Subcommands:

* ``mix``      render a mix from a params JSON file
* ``randmix``  render a mix from seeded random parameters
* ``match``    optimize parameters so the mix matches a reference's style
* ``eval``     score a mix against a reference
* ``method1``  run the self-supervised experiment over several seeds

Exit codes: 0 success, 1 usage error, 2 data error (unreadable audio,
silent input, bad parameter files, ...).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .audio_io import load_multitrack, read_wav, write_wav
from .console import mix
from .errors import MixmatchError, UnsupportedAudioError
from .experiment import evaluate_mix, run_method1_experiment
from .optimize import OptimizerConfig, match_style
from .params import load_params, sample_random_params, save_params

log = logging.getLogger("mixmatch")


class _UsageError(Exception):
    def __init__(self, parser: argparse.ArgumentParser, message: str):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that defers exiting so main() can own the exit code."""

    def error(self, message):
        raise _UsageError(self, message)


def _seed_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}, expected e.g. 1,2,3")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixmatch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mix", help="render a mix from a params file")
    p.add_argument("--tracks", required=True, help="directory of track WAVs")
    p.add_argument("--params", required=True, help="console params JSON")
    p.add_argument("--out", required=True, help="output WAV path")
    p.add_argument("--format", choices=("float32", "pcm16"), default="float32")

    p = sub.add_parser("randmix", help="render a seeded random mix")
    p.add_argument("--tracks", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--params-out", required=True, help="where to write the drawn params")
    p.add_argument("--max-tracks", type=int, default=None)

    p = sub.add_parser("match", help="optimize a mix toward a reference's style")
    p.add_argument("--tracks", required=True)
    p.add_argument("--ref", required=True, help="stereo reference WAV")
    p.add_argument("--out", required=True)
    p.add_argument("--params-out", required=True)
    p.add_argument("--loss", choices=("af", "mrstft"), default="af")
    p.add_argument("--grad", choices=("fd", "spsa"), default="spsa")
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spsa-averages", type=int, default=2)
    p.add_argument("--max-tracks", type=int, default=None)
    p.add_argument("--report", default=None, help="optional optimization report JSON")

    p = sub.add_parser("eval", help="score a mix against a reference")
    p.add_argument("--mix", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--json", default=None, help="optional report JSON path")

    p = sub.add_parser("method1", help="run the self-supervised experiment")
    p.add_argument("--tracks", required=True)
    p.add_argument("--seeds", type=_seed_list, required=True, help="e.g. 1,2,3")
    p.add_argument("--loss", choices=("af", "mrstft"), default="af")
    p.add_argument("--csv", default=None, help="write per-seed rows here")
    p.add_argument("--grad", choices=("fd", "spsa"), default="spsa")
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--spsa-averages", type=int, default=2)
    p.add_argument("--segment-seconds", type=float, default=10.0)
    p.add_argument("--max-tracks", type=int, default=16)
    p.add_argument(
        "--no-figures",
        action="store_true",
        help="skip the PNG figures rendered next to the CSV",
    )
    return parser


def _require_stereo(buffer, what: str):
    if not buffer.is_stereo:
        raise UnsupportedAudioError(f"{what} must be stereo")
    return buffer


def _cmd_mix(args) -> int:
    tracks = load_multitrack(args.tracks)
    params = load_params(args.params)
    rendered = mix(tracks, params)
    write_wav(rendered, args.out, args.format)
    log.info("wrote %s (%d tracks)", args.out, tracks.n_tracks)
    return 0


def _cmd_randmix(args) -> int:
    tracks = load_multitrack(args.tracks, max_tracks=args.max_tracks, seed=args.seed)
    params = sample_random_params(tracks.n_tracks, args.seed)
    write_wav(mix(tracks, params), args.out)
    save_params(params, args.params_out)
    log.info("wrote %s and %s", args.out, args.params_out)
    return 0


def _cmd_match(args) -> int:
    tracks = load_multitrack(args.tracks, max_tracks=args.max_tracks, seed=args.seed)
    reference = _require_stereo(read_wav(args.ref), "reference")
    cfg = OptimizerConfig(
        grad_mode=args.grad,
        max_iters=args.iters,
        seed=args.seed,
        spsa_averages=args.spsa_averages,
    )
    report = match_style(tracks, reference, cfg=cfg, loss_kind=args.loss)
    write_wav(mix(tracks, report.best_params), args.out)
    save_params(report.best_params, args.params_out)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    log.info(
        "loss %.6f -> %.6f in %d iterations (%.1fs)",
        report.loss_trace[0],
        report.best_loss,
        report.iterations_run,
        report.wall_time,
    )
    print(f"initial {args.loss} loss: {report.loss_trace[0]:.6f}")
    print(f"final   {args.loss} loss: {report.best_loss:.6f}")
    return 0


def _cmd_eval(args) -> int:
    report = evaluate_mix(args.mix, args.ref)
    for key, value in report.features.to_json().items():
        print(f"{key}: {value:.6g}")
    if report.mrstft is not None:
        print(f"MRSTFT: {report.mrstft:.6g}")
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    return 0


def _cmd_method1(args) -> int:
    cfg = OptimizerConfig(
        grad_mode=args.grad, max_iters=args.iters, spsa_averages=args.spsa_averages
    )
    summary = run_method1_experiment(
        args.tracks,
        args.seeds,
        cfg=cfg,
        loss_kind=args.loss,
        segment_seconds=args.segment_seconds,
        max_tracks=args.max_tracks,
    )
    header = "  ".join(f"{c:>13}" for c in ("seed", "init", "final", "baseline", "af_vs_gt"))
    print(header)
    for row in summary.rows:
        print(
            f"{row.seed:>13}  {row.init_loss:>13.6f}  {row.final_loss:>13.6f}  "
            f"{row.baseline_loss:>13.6f}  {row.af_vs_gt:>13.6f}"
        )
    medians = summary.medians()
    print("medians: " + ", ".join(f"{k}={v:.6f}" for k, v in medians.items()))
    if args.csv:
        summary.write_csv(args.csv)
        log.info("wrote %s", args.csv)
        if not args.no_figures:
            from .plots import save_method1_figures

            for path in save_method1_figures(summary, args.csv):
                log.info("wrote %s", path)
    return 0


_HANDLERS = {
    "mix": _cmd_mix,
    "randmix": _cmd_randmix,
    "match": _cmd_match,
    "eval": _cmd_eval,
    "method1": _cmd_method1,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _HANDLERS[args.command](args)
    except (MixmatchError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
