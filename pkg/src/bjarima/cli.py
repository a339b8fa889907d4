"""Command-line interface: ``bjarima run|fit|adf|forecast|simulate|selftest``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict

from .diagnostics import simulate_arima
from .errors import ArimaError
from .estimation import ArimaOrder, fit_best_effort, identify
from .forecasting import forecast
from .pipeline import BUNDLED_FIXTURE, PipelineConfig, ingest_owid_csv, run_pipeline
from .series import difference, impute_monthly_mean
from .stattests import adf_test

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _order(text: str):
    if text == "auto":
        return "auto"
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected 'auto' or p,d,q, got {text!r}")
    try:
        return ArimaOrder(*(int(v) for v in parts))
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"expected 'auto' or p,d,q: {exc}") from None


def _floats(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _load_series(args):
    raw = ingest_owid_csv(args.input, args.country, args.start, args.end)
    return impute_monthly_mean(raw)


def _series_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", default=str(BUNDLED_FIXTURE), help="OWID-schema CSV")
    p.add_argument("--country", required=True)
    p.add_argument("--start", default="2020-04-01")
    p.add_argument("--end", default="2020-09-12")


def _resolve_order(args, series):
    if args.order == "auto":
        return identify(series).order
    return args.order


def cmd_run(args) -> int:
    overrides = {
        "input_path": args.input,
        "countries": args.countries,
        "date_start": args.start,
        "date_end": args.end,
        "horizon": args.horizon,
        "level": args.level,
        "threshold": args.threshold,
        "window": args.window,
        "order_mode": None if args.order is None else (
            "auto" if args.order == "auto" else tuple(args.order)),
        "bic_variant": args.bic_variant,
        "output_dir": args.output_dir,
    }
    if args.config:
        config = PipelineConfig.from_file(args.config, **overrides)
    else:
        config = PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})
    reports = run_pipeline(config)
    failed = [r for r in reports if not r.ok]
    for r in reports:
        if r.ok:
            print(f"{r.country}: ARIMA{r.order} verdict={r.policy.verdict} "
                  f"multiplier={r.policy.required_test_multiplier:.4f}")
        else:
            print(f"{r.country}: FAILED {r.error}")
    print(f"{len(reports) - len(failed)}/{len(reports)} countries succeeded; "
          f"reports in {config.output_dir}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_fit(args) -> int:
    series = _load_series(args)
    order = _resolve_order(args, series)
    model = fit_best_effort(series, order)
    out = {
        "country": args.country,
        "order": [order.p, order.d, order.q],
        "phi": model.phi.tolist(),
        "theta": model.theta.tolist(),
        "mean": model.mean,
        "sigma2": model.sigma2,
        "loglik": model.loglik,
        "aic": model.aic,
        "bic_paper": model.bic_paper,
        "bic_standard": model.bic_standard,
        "n_effective": model.n_effective,
        "converged": model.converged,
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_adf(args) -> int:
    series = _load_series(args)
    if args.diff:
        series = difference(series, args.diff)
    print(json.dumps(asdict(adf_test(series, args.lag)), indent=2))
    return EXIT_OK


def cmd_forecast(args) -> int:
    series = _load_series(args)
    order = _resolve_order(args, series)
    model = fit_best_effort(series, order)
    fc = forecast(model, series, args.horizon, args.level)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["date", "point", "lower", "upper"])
        for d, a, b, c in zip(fc.dates, fc.point, fc.lower, fc.upper):
            writer.writerow([d.isoformat(), f"{a:.4f}", f"{b:.4f}", f"{c:.4f}"])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_simulate(args) -> int:
    order = args.order
    ts = simulate_arima(order, args.phi, args.theta, args.mean, args.sigma,
                        args.n, args.seed, name=args.name)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["date", "location", "positive_rate"])
        for d, v in zip(ts.dates, ts.values):
            writer.writerow([d.isoformat(), args.name, repr(float(v))])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .acceptance import AcceptanceSuite

    suite = AcceptanceSuite()
    results = suite.run_all(only=args.only)
    for res in results:
        print(res.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bjarima", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full per-country pipeline")
    p.add_argument("--config", help="JSON file supplying any of the flags below")
    p.add_argument("--input")
    p.add_argument("--countries", help="comma-separated location names")
    p.add_argument("--start")
    p.add_argument("--end")
    p.add_argument("--horizon", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--window", type=int)
    p.add_argument("--order", type=_order, help="'auto' or p,d,q")
    p.add_argument("--bic-variant", choices=("paper", "standard"))
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fit", help="fit one country and print the model")
    _series_args(p)
    p.add_argument("--order", type=_order, default="auto")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("adf", help="augmented Dickey-Fuller test")
    _series_args(p)
    p.add_argument("--lag", type=int)
    p.add_argument("--diff", type=int, default=0, help="difference d times first")
    p.set_defaults(func=cmd_adf)

    p = sub.add_parser("forecast", help="forecast one country as CSV")
    _series_args(p)
    p.add_argument("--order", type=_order, default="auto")
    p.add_argument("--horizon", type=int, default=30)
    p.add_argument("--level", type=float, default=0.80)
    p.add_argument("--output")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("simulate", help="draw a seeded ARIMA series as OWID-schema CSV")
    p.add_argument("--order", type=_order, required=True)
    p.add_argument("--phi", type=_floats, default=[])
    p.add_argument("--theta", type=_floats, default=[])
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="simulated")
    p.add_argument("--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", help="run the Monte Carlo acceptance suite")
    p.add_argument("--only", type=lambda s: [int(v) for v in s.split(",")],
                   help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ArimaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
