"""Regenerate src/bjarima/data/owid_synthetic.csv.

Synthetic positive-rate paths shaped loosely after the six countries in
the study. Mexico is a random walk pinned to end at exactly 50%; the seed
is searched until automatic identification picks ARIMA(0,1,0) for it, so
its forecast is flat at 50%.
"""
import csv
import datetime as dt
import sys
from pathlib import Path

import numpy as np

from bjarima.estimation import ArimaOrder, identify
from bjarima.pipeline import BUNDLED_FIXTURE, PipelineConfig
from bjarima.series import TimeSeries

START = dt.date(2020, 3, 20)
END = dt.date(2020, 9, 20)
DATES = [START + dt.timedelta(days=i) for i in range((END - START).days + 1)]
N = len(DATES)
t = np.linspace(0.0, 1.0, N)

COUNTRIES = {
    "United States": ("USA", "North America"),
    "Russia": ("RUS", "Europe"),
    "South Africa": ("ZAF", "Africa"),
    "India": ("IND", "Asia"),
    "Mexico": ("MEX", "North America"),
    "Spain": ("ESP", "Europe"),
    "Germany": ("DEU", "Europe"),
}


def ar1(rng, phi, sd, n=N):
    e = rng.normal(0.0, sd, n + 100)
    y = np.zeros_like(e)
    for i in range(1, len(e)):
        y[i] = phi * y[i - 1] + e[i]
    return y[100:]


def frac(pct):
    return np.round(np.asarray(pct) / 100.0, 4)


def in_window(dates, values):
    cfg = PipelineConfig()
    keep = [(d, v) for d, v in zip(dates, values) if cfg.date_start <= d <= cfg.date_end]
    return [d for d, _ in keep], np.array([v for _, v in keep])


def mexico_path():
    cfg = PipelineConfig()
    caps = ArimaOrder(*cfg.caps)
    for seed in range(10_000):
        rng = np.random.default_rng(seed)
        walk = np.cumsum(rng.normal(0.0, 0.6, N))
        last = DATES.index(cfg.date_end)
        pct = walk - walk[last] + 50.0
        f = frac(pct)
        f[last] = 0.5
        dates, vals = in_window(DATES, f * 100.0)
        order = identify(TimeSeries(dates, vals), caps).order
        if order == ArimaOrder(0, 1, 0):
            return seed, f
    raise RuntimeError("no seed gave ARIMA(0,1,0)")


def build():
    rng = np.random.default_rng(20200912)
    data = {}
    data["United States"] = frac(7.2 - 1.4 * t + 0.8 * np.sin(3 * np.pi * t) + ar1(rng, 0.8, 0.12))
    data["Russia"] = frac(np.clip(2.6 - 0.9 * t + np.cumsum(rng.normal(0, 0.02, N)), 0.3, None))
    data["South Africa"] = frac(np.clip(4 + 22 * np.exp(-((t - 0.6) / 0.18) ** 2) + ar1(rng, 0.7, 0.4), 0.5, None))
    data["India"] = frac(np.clip(9.0 - 1.3 * t + np.cumsum(rng.normal(0, 0.08, N)), 1.0, None))
    seed, data["Mexico"] = mexico_path()
    data["Spain"] = frac(np.clip(9.0 - 7.0 * np.exp(-((t - 0.4) / 0.12) ** 2) + 5 * np.maximum(t - 0.6, 0) + ar1(rng, 0.6, 0.35), 0.3, None))
    data["Germany"] = frac(np.clip(3.0 - 2 * t + ar1(rng, 0.5, 0.1), 0.2, None))

    gaps = {
        "United States": [dt.date(2020, 5, 3), dt.date(2020, 5, 17), dt.date(2020, 7, 4)],
        "India": [dt.date(2020, 6, 1), dt.date(2020, 6, 2)],
        "Spain": [dt.date(2020, 4, 11), dt.date(2020, 8, 15), dt.date(2020, 8, 16)],
    }
    rows = []
    for country, (iso, continent) in COUNTRIES.items():
        for i, day in enumerate(DATES):
            v = "" if day in gaps.get(country, ()) else f"{data[country][i]:.4f}"
            tests = 10_000 + 37 * i
            rows.append([iso, continent, country, day.isoformat(), tests, v])
    return seed, rows


def main(path=BUNDLED_FIXTURE):
    seed, rows = build()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iso_code", "continent", "location", "date", "new_tests", "positive_rate"])
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {path} (Mexico seed {seed})")


if __name__ == "__main__":
    main(*(Path(a) for a in sys.argv[1:]))
