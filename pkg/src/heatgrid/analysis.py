"""Diagnostics: residual load, RLDCs, peaks, events, deltas, cost reports.

All functions are pure and operate on plain arrays (or objects exposing
``.values``); emitters at the bottom turn persisted results into tidy,
plot-ready CSV/JSON. Conventions:

* Residual load = electric load minus all variable-renewable generation;
  heat-pump electricity is excluded unless explicitly included.
* A *heat deviation event* is a maximal run of hours with heat demand
  strictly above its window mean; its magnitude is the cumulative excess.
  Hours exactly at the mean terminate an event (strictness makes the
  partition deterministic).
* A *residual-load event* is a maximal run of strictly positive residual
  load; its magnitude is the cumulative residual energy.
* Event magnitudes are normalized by the largest event of the same series
  (per country and year), so exactly one event per series carries 1.0.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ids import VARIABLE_RENEWABLES
from .series import AlignmentError


class MismatchedScenario(ValueError):
    """Paired results differ in year or variant."""


# "Strictly above the mean" is evaluated with a small relative epsilon so
# that a constant series (whose float mean may differ from its elements in
# the last bit) produces no events.
MEAN_EPS_REL = 1e-9


def _values(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=float)


def residual_load(load, vre_gen, hp_electricity=None, include_hp: bool = False) -> np.ndarray:
    """Load minus total VRE generation; optionally add heat-pump load."""
    out = _values(load).copy()
    for gen in vre_gen:
        arr = _values(gen)
        if len(arr) != len(out):
            raise AlignmentError(f"VRE series length {len(arr)} != load length {len(out)}")
        out -= arr
    if include_hp:
        if hp_electricity is None:
            raise AlignmentError("include_hp requires the heat-pump electricity series")
        arr = _values(hp_electricity)
        if len(arr) != len(out):
            raise AlignmentError("heat-pump series misaligned with load")
        out += arr
    return out


def rldc(series, top_n: int) -> np.ndarray:
    """First `top_n` values of the duration curve (sorted descending)."""
    arr = _values(series)
    if top_n > len(arr):
        raise ValueError(f"top_n {top_n} exceeds series length {len(arr)}")
    return np.sort(arr)[::-1][:top_n].copy()


def daily_totals(series) -> np.ndarray:
    """Calendar-day sums (UTC) of an hourly series anchored at midnight.

    Series start on July 1 00:00, so day boundaries fall at multiples of
    24; a trailing partial day is dropped.
    """
    arr = _values(series)
    days = len(arr) // 24
    if days == 0:
        raise ValueError("need at least one full day")
    return arr[: days * 24].reshape(days, 24).sum(axis=1)


@dataclass(frozen=True)
class PeakRecord:
    country: str  # a country code, or 'total' for the cross-country sum
    quantity: str
    hour: int
    value: float


def peak_records(series_by_country: dict, quantity: str) -> list:
    """Per-country argmax records plus a `total` record on the summed series.

    Ties break toward the earliest hour. The `total` record is the argmax
    of the sum over countries, independent of the per-country peaks.
    """
    records = []
    total = None
    for country in sorted(series_by_country):
        arr = _values(series_by_country[country])
        if total is not None and len(arr) != len(total):
            raise AlignmentError(f"{country}: length {len(arr)} != {len(total)}")
        total = arr.copy() if total is None else total + arr
        hour = int(np.argmax(arr))
        records.append(PeakRecord(country, quantity, hour, float(arr[hour])))
    if total is not None:
        hour = int(np.argmax(total))
        records.append(PeakRecord("total", quantity, hour, float(total[hour])))
    return records


def top_k_records(series_by_country: dict, quantity: str, k: int) -> dict:
    """Top-k hours per country (and `total`), largest first.

    Companion to `peak_records` for looking past the single maximum; no
    particular cross-country statistic is claimed for k > 1.
    """
    out = {}
    total = None
    for country in sorted(series_by_country):
        arr = _values(series_by_country[country])
        total = arr.copy() if total is None else total + arr
        order = np.argsort(-arr, kind="stable")[:k]
        out[country] = [PeakRecord(country, quantity, int(h), float(arr[h])) for h in order]
    if total is not None:
        order = np.argsort(-total, kind="stable")[:k]
        out["total"] = [PeakRecord("total", quantity, int(h), float(total[h])) for h in order]
    return out


@dataclass(frozen=True)
class Event:
    start_hour: int
    end_hour: int  # exclusive
    magnitude_mwh: float
    normalized: float  # in (0, 1]; exactly one event per series is 1.0

    @property
    def length(self) -> int:
        return self.end_hour - self.start_hour


def _runs(mask: np.ndarray):
    """(start, end) pairs of maximal True runs."""
    if not mask.any():
        return []
    diff = np.diff(mask.astype(np.int8))
    starts = list(np.flatnonzero(diff == 1) + 1)
    ends = list(np.flatnonzero(diff == -1) + 1)
    if mask[0]:
        starts.insert(0, 0)
    if mask[-1]:
        ends.append(len(mask))
    return list(zip(starts, ends))


def _normalize(events_raw: list) -> list:
    if not events_raw:
        return []
    top = max(mag for _, _, mag in events_raw)
    out = []
    for start, end, mag in events_raw:
        ratio = mag / top
        if ratio == 0.0:
            ratio = 5e-324  # magnitude > 0 by construction; keep (0, 1]
        out.append(Event(start, end, mag, ratio))
    return out


def deviation_threshold(arr: np.ndarray) -> float:
    """Absolute epsilon below which an excess over the mean is noise."""
    return MEAN_EPS_REL * max(1.0, float(np.abs(arr).max(initial=0.0)))


def deviation_events(heat) -> list:
    """Maximal runs of heat demand strictly above its window mean."""
    arr = _values(heat)
    if len(arr) == 0:
        raise ValueError("empty series")
    excess = arr - arr.mean()
    eps = deviation_threshold(arr)
    out = []
    for start, end in _runs(excess > eps):
        out.append((start, end, float(excess[start:end].sum())))
    return _normalize(out)


def residual_events(residual) -> list:
    """Maximal runs of strictly positive residual load."""
    arr = _values(residual)
    if len(arr) == 0:
        raise ValueError("empty series")
    out = []
    for start, end in _runs(arr > 0.0):
        out.append((start, end, float(arr[start:end].sum())))
    return _normalize(out)


def firm_capacity_delta(with_hp, without_hp) -> dict:
    """Capacity(with) - capacity(without), aggregated over countries.

    Both results must share year and variant. Returns per-name deltas in
    MW plus a `firm_total` over dispatchable generation and storage
    discharge power.
    """
    if with_hp.year != without_hp.year:
        raise MismatchedScenario(
            f"year {with_hp.year} vs {without_hp.year}"
        )
    if _variant_of(with_hp) != _variant_of(without_hp):
        raise MismatchedScenario(
            f"variant {_variant_of(with_hp)} vs {_variant_of(without_hp)}"
        )
    a = with_hp.firm_capacity_mw()
    b = without_hp.firm_capacity_mw()
    names = sorted(set(a) | set(b))
    deltas = {name: a.get(name, 0.0) - b.get(name, 0.0) for name in names}
    deltas["firm_total"] = sum(deltas[n] for n in names)
    return deltas


def _variant_of(result) -> str:
    spec = getattr(result, "spec", None)
    if spec is not None:
        return spec.variant
    return result.variant


def heat_cost_eur_per_mwh(delta_cost_eur: float, heat_supplied_mwh: float):
    """Extra system cost per MWh of heat supplied; None when no heat."""
    if heat_supplied_mwh <= 0.0:
        return None
    return delta_cost_eur / heat_supplied_mwh


def cost_report(result, baseline=None) -> dict:
    """Objective decomposition, optionally with a no-heat-pump baseline.

    With a baseline, adds the cost delta and the implied heat price
    (delta cost per MWh of heat supplied; None when nothing was supplied).
    """
    costs = _costs_of(result)
    report = {
        "investment_eur": costs["investment"],
        "fixed_om_eur": costs["fixed_om"],
        "variable_eur": costs["variable"],
        "storage_marginal_eur": costs["storage_marginal"],
        "total_eur": costs["total"],
        "objective_eur": costs["objective"],
        "heat_supplied_mwh": costs["heat_supplied_mwh"],
    }
    if baseline is not None:
        base_costs = _costs_of(baseline)
        delta = costs["total"] - base_costs["total"]
        report["baseline_total_eur"] = base_costs["total"]
        report["delta_cost_eur"] = delta
        report["heat_cost_eur_per_mwh"] = heat_cost_eur_per_mwh(
            delta, costs["heat_supplied_mwh"]
        )
    return report


def _costs_of(result) -> dict:
    # ScenarioResult (in memory) and PersistedResult (read back) both work.
    if hasattr(result, "costs_eur"):
        costs = dict(result.costs_eur)
        costs.setdefault("objective", costs.get("total"))
        return costs
    breakdown = dict(result.cost_breakdown)
    breakdown["objective"] = result.objective
    breakdown["heat_supplied_mwh"] = (
        result.solved.heat_supplied_mwh if result.solved else 0.0
    )
    return breakdown


# ---------------------------------------------------------------------------
# Emitters over persisted results (plot-ready CSV/JSON)
# ---------------------------------------------------------------------------


def result_residual_load(result, country: str, include_hp: bool = False) -> np.ndarray:
    vre = [result.generation_mw(country, tech) for tech in VARIABLE_RENEWABLES]
    return residual_load(
        result.load_mw(country), vre,
        hp_electricity=result.hp_load_mw(country), include_hp=include_hp,
    )


def system_residual_load(result, include_hp: bool = False) -> np.ndarray:
    total = None
    for c in result.countries():
        arr = result_residual_load(result, c, include_hp=include_hp)
        total = arr if total is None else total + arr
    return total


def country_heat_demand(result, country: str) -> np.ndarray:
    """Total heat OUTPUT target of the fleet (MW_th) as persisted."""
    total = np.zeros(result.hours)
    for (c, _unit), fields in result.heat_mw.items():
        if c == country:
            total += fields["heat_output_mw_th"]
    return total


def emit_rldc_csv(results, path, top_n: int = 50) -> Path:
    """System RLDCs, with and without heat-pump load, per result."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "year", "with_hp_load", "rank", "residual_mw"])
        for result in results:
            for include_hp in (False, True):
                series = system_residual_load(result, include_hp=include_hp)
                n = min(top_n, len(series))
                for rank, value in enumerate(rldc(series, n)):
                    writer.writerow(
                        [result.name, result.year, int(include_hp), rank, repr(float(value))]
                    )
    return path


def emit_peaks_csv(results, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "year", "quantity", "country", "hour", "value_mw"])
        for result in results:
            bundles = {
                "heat_demand": {c: country_heat_demand(result, c) for c in result.countries()},
                "heat_pump_load": {c: result.hp_load_mw(c) for c in result.countries()},
                "residual_load": {
                    c: result_residual_load(result, c) for c in result.countries()
                },
            }
            for quantity, per_country in bundles.items():
                for rec in peak_records(per_country, quantity):
                    writer.writerow(
                        [result.name, result.year, quantity, rec.country, rec.hour, repr(rec.value)]
                    )
    return path


def emit_events_csv(results, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["scenario", "year", "event_type", "country", "start_hour",
             "end_hour", "magnitude_mwh", "normalized"]
        )
        for result in results:
            for c in result.countries():
                heat = country_heat_demand(result, c)
                if heat.any():
                    for ev in deviation_events(heat):
                        writer.writerow(
                            [result.name, result.year, "heat_deviation", c,
                             ev.start_hour, ev.end_hour, repr(ev.magnitude_mwh), repr(ev.normalized)]
                        )
                for ev in residual_events(result_residual_load(result, c)):
                    writer.writerow(
                        [result.name, result.year, "positive_residual", c,
                         ev.start_hour, ev.end_hour, repr(ev.magnitude_mwh), repr(ev.normalized)]
                    )
    return path


def emit_daily_heat_csv(results, path) -> Path:
    """Calendar-day heat-demand totals per country (plot-ready)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "year", "country", "day", "heat_output_mwh_th"])
        for result in results:
            for c in result.countries():
                heat = country_heat_demand(result, c)
                if not heat.any() or len(heat) < 24:
                    continue
                for day, value in enumerate(daily_totals(heat)):
                    writer.writerow([result.name, result.year, c, day, repr(float(value))])
    return path


def pair_results(results) -> list:
    """(with_hp, without_hp) pairs sharing (variant, year, window)."""
    by_key = {}
    for result in results:
        key = (_variant_of(result), result.year)
        by_key.setdefault(key, []).append(result)
    pairs = []
    for key in sorted(by_key):
        group = by_key[key]
        base = [r for r in group if _share_of(r) == 0.0]
        with_hp = [r for r in group if _share_of(r) > 0.0]
        for w in sorted(with_hp, key=lambda r: _name_of(r)):
            if base:
                pairs.append((w, base[0]))
    return pairs


def _share_of(result) -> float:
    spec = getattr(result, "spec", None)
    return spec.heat_share if spec is not None else result.heat_share


def _name_of(result) -> str:
    spec = getattr(result, "spec", None)
    return spec.name if spec is not None else result.name


def emit_firm_delta_csv(results, path) -> Path:
    path = Path(path)
    pairs = pair_results(results)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scenario", "baseline", "year", "name", "delta_mw"])
        for with_hp, without_hp in pairs:
            for name, delta in sorted(firm_capacity_delta(with_hp, without_hp).items()):
                writer.writerow(
                    [_name_of(with_hp), _name_of(without_hp), with_hp.year, name, repr(float(delta))]
                )
    return path


def emit_cost_report_json(results, path) -> Path:
    path = Path(path)
    pairs = {( _name_of(w), w.year): b for w, b in pair_results(results)}
    out = []
    for result in results:
        baseline = pairs.get((_name_of(result), result.year))
        report = cost_report(result, baseline=baseline)
        report["scenario"] = _name_of(result)
        report["year"] = result.year
        out.append(report)
    path.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    return path
