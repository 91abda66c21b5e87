"""Command-line entry point: trace playback, benchmarking, trace synthesis,
and the streaming service.

Playback is logical-time: the control period is 1/rate regardless of wall
clock, so step logs are machine-independent (wall-clock latency is still
measured per step and reported). Step logs are JSON lines with keys
``t, q, dq, latency_s, h_min, qp_status, tracking_error, active_pairs``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .baseline import NlpParams, run_baseline_session
from .metrics import SafetyConfig, build_report, cumulative_gain, default_anchors, latency_stats, motion_preservation
from .model import ModelError, load_model
from .retarget import RetargetParams, run_session
from .traces import TRACE_KINDS, fixture_model, generate_trace, read_trace, write_trace


class CliError(Exception):
    """User-facing failure; message printed to stderr, nonzero exit."""


def _params_from_args(args) -> RetargetParams:
    return RetargetParams(
        alpha=args.alpha,
        beta=args.beta,
        dt=1.0 / args.rate,
        cbf_enabled=args.cbf == "on",
        gamma=args.gamma,
        safety_threshold=args.threshold,
        activation_distance=args.activation,
        keypoint_scale=args.scale,
    )


def _add_param_flags(sub):
    sub.add_argument("--rate", type=float, default=100.0, help="control rate, Hz")
    sub.add_argument("--alpha", type=float, default=1.0, help="tracking weight")
    sub.add_argument("--beta", type=float, default=0.01, help="smoothness weight")
    sub.add_argument("--gamma", type=float, default=5.0, help="barrier rate, 1/s")
    sub.add_argument(
        "--threshold", type=float, default=0.01, help="protected clearance D_safe, m"
    )
    sub.add_argument(
        "--activation", type=float, default=0.011,
        help="clearance below which barrier rows activate, m",
    )
    sub.add_argument("--cbf", choices=("on", "off"), default="on")
    sub.add_argument("--scale", type=float, default=1.0, help="keypoint scale factor")


def _load_inputs(args):
    try:
        model = load_model(args.model)
    except (OSError, ModelError) as e:
        raise CliError(f"{args.model}: {e}") from e
    try:
        frames = read_trace(args.trace)
    except (OSError, ValueError) as e:
        raise CliError(str(e)) from e
    if not frames:
        raise CliError(f"{args.trace}: empty trace")
    n_expected = len(model.keypoints)
    n_found = frames[0].keypoints.shape[0]
    if n_found != n_expected:
        raise CliError(
            f"{args.trace}: expected {n_expected} keypoints per frame, found {n_found}"
        )
    return model, frames


def _jsonable(x: float):
    return None if not math.isfinite(x) else x


def _write_step_log(path: Path, frames, results, status_of, active_of) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for frame, r in zip(frames, results):
            f.write(
                json.dumps(
                    {
                        "t": frame.timestamp,
                        "q": r.q.tolist(),
                        "dq": r.dq.tolist(),
                        "latency_s": r.solve_latency,
                        "h_min": _jsonable(r.h_min),
                        "qp_status": status_of(r),
                        "tracking_error": r.tracking_error,
                        "active_pairs": active_of(r),
                    }
                )
                + "\n"
            )


def _motion_series(model, frames, results):
    cfg = default_anchors(model)
    return [
        motion_preservation(frame.keypoints, r.robot_keypoints, cfg)
        for frame, r in zip(frames, results)
    ]


def cmd_run(args) -> int:
    model, frames = _load_inputs(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = _params_from_args(args)
    period = 1.0 / args.rate
    safety_cfg = SafetyConfig(d_safe=args.threshold)

    qp_results = baseline_results = None
    if args.mode in ("qp", "both"):
        qp_results = list(run_session(model, params, frames))
        _write_step_log(
            out_dir / "steps_qp.jsonl", frames, qp_results,
            status_of=lambda r: r.qp_status,
            active_of=lambda r: [list(p) for p in r.active_cbf_pairs],
        )
    if args.mode in ("baseline", "both"):
        nlp = NlpParams(alpha=args.alpha, beta=args.beta)
        baseline_results = list(
            run_baseline_session(model, nlp, frames, keypoint_scale=args.scale)
        )
        _write_step_log(
            out_dir / "steps_baseline.jsonl", frames, baseline_results,
            status_of=lambda r: "baseline",
            active_of=lambda r: [],
        )

    primary = qp_results if qp_results is not None else baseline_results
    motion = _motion_series(model, frames, primary)
    gain = None
    if args.mode == "both":
        motion_base = _motion_series(model, frames, baseline_results)
        gain = cumulative_gain(motion, motion_base)
    report = build_report(
        latencies=[r.solve_latency for r in primary],
        period=period,
        motion_series=motion,
        h_min_series=[r.h_min for r in primary],
        safety_cfg=safety_cfg,
        gain_series=gain,
    )
    with open(out_dir / "report.json", "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
    print(f"wrote {out_dir}/report.json ({len(frames)} steps, mode={args.mode})")
    return 0


def cmd_bench(args) -> int:
    model, frames = _load_inputs(args)
    params = _params_from_args(args)
    nlp = NlpParams(alpha=args.alpha, beta=args.beta)
    period = 1.0 / args.rate

    rows = []
    for rep in range(args.repeat):
        for method, latencies in (
            ("qp", [r.solve_latency for r in run_session(model, params, frames)]),
            (
                "baseline",
                [
                    r.solve_latency
                    for r in run_baseline_session(
                        model, nlp, frames, keypoint_scale=args.scale
                    )
                ],
            ),
        ):
            stats = latency_stats(latencies, period)
            rows.append(
                {
                    "method": method,
                    "repetition": rep,
                    "mean_ms": stats.mean * 1e3,
                    "std_ms": stats.std * 1e3,
                    "p99_ms": stats.p99 * 1e3,
                    "rt_fraction": stats.rt_fraction,
                }
            )

    header = f"{'method':<10}{'rep':>4}{'mean_ms':>10}{'std_ms':>9}{'p99_ms':>9}{'rt@' + format(args.rate, 'g') + 'Hz_%':>12}"
    print(header)
    for row in rows:
        print(
            f"{row['method']:<10}{row['repetition']:>4}"
            f"{row['mean_ms']:>10.3f}{row['std_ms']:>9.3f}{row['p99_ms']:>9.3f}"
            f"{row['rt_fraction'] * 100:>12.2f}"
        )
    qp_means = [r["mean_ms"] for r in rows if r["method"] == "qp"]
    base_means = [r["mean_ms"] for r in rows if r["method"] == "baseline"]
    ordering = all(q < b for q, b in zip(qp_means, base_means))
    print(f"qp_mean_below_baseline_in_every_repetition: {ordering}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump({"rows": rows, "qp_mean_below_baseline": ordering}, f, indent=2)
    return 0


def cmd_serve(args) -> int:
    from .serve import run_server

    try:
        model = load_model(args.model)
    except (OSError, ModelError) as e:
        raise CliError(f"{args.model}: {e}") from e
    try:
        run_server(model, _params_from_args(args), host=args.host, port=args.port)
    except OSError as e:
        raise CliError(f"cannot bind {args.host}:{args.port}: {e}") from e
    return 0


def cmd_gen_trace(args) -> int:
    if args.model:
        try:
            model = load_model(args.model)
        except (OSError, ModelError) as e:
            raise CliError(f"{args.model}: {e}") from e
    else:
        model = fixture_model()
    try:
        frames = generate_trace(
            model, args.kind, n_frames=args.frames, rate=args.rate, seed=args.seed
        )
    except ValueError as e:
        raise CliError(str(e)) from e
    write_trace(args.out, frames)
    print(f"wrote {args.out} ({len(frames)} frames, kind={args.kind})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="handretarget",
        description="Real-time hand retargeting: QP playback, benchmarks, "
        "trace synthesis, and the interactive session service.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="replay a trace, write step log + report")
    run.add_argument("--model", required=True)
    run.add_argument("--trace", required=True)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--mode", choices=("qp", "baseline", "both"), default="qp")
    _add_param_flags(run)
    run.set_defaults(fn=cmd_run)

    bench = subs.add_parser("bench", help="latency comparison of qp vs baseline")
    bench.add_argument("--model", required=True)
    bench.add_argument("--trace", required=True)
    bench.add_argument("--out", help="optional JSON output path")
    bench.add_argument("--repeat", type=int, default=1)
    _add_param_flags(bench)
    bench.set_defaults(fn=cmd_bench)

    serve = subs.add_parser("serve", help="run the interactive session service")
    serve.add_argument("--model", required=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8765)
    _add_param_flags(serve)
    serve.set_defaults(fn=cmd_serve)

    gen = subs.add_parser("gen-trace", help="synthesize a keypoint trace")
    gen.add_argument("--kind", choices=TRACE_KINDS, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--model", help="model file (default: bundled fixture)")
    gen.add_argument("--frames", type=int, default=500)
    gen.add_argument("--rate", type=float, default=100.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.set_defaults(fn=cmd_gen_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
