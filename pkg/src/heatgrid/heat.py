"""Heat-pump module: coverage shares, thermal storage, COP, fleet sizing.

Per (building type bt, sink st, heat-pump type hpt) and hour h, with an
exogenous coverage share ``s`` and heat demand ``hd``:

    heat output    HO[h] = s * hd[h]                       (coverage)
    storage state  HL[h] = HL[h-1] + HI[h] - HO[h]         (lossless tank)
    electricity    HI[h] = cop[h] * E[h]                   (COP link)

Fleet sizing is not a cost decision: heat-output capacity is the peak of
HO, electricity-input capacity the peak of HO/cop (the two peaks may fall
in different hours), and tank size is ``ep`` hours of heat-output
capacity. Storage is cyclic over the window (HL before hour 0 equals HL
of the last hour), lossless, and shares the heat-output nameplate for
charging. Space and water sinks keep separate COPs and are never pooled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ids import BUILDING_TYPES, HEAT_PUMP_TYPES, SINKS
from .series import AlignmentError, CopSet, HeatDemandSet


class DivisionDomain(ValueError):
    """COP outside (0, inf): the electricity conversion is undefined."""


@dataclass(frozen=True)
class HeatConfig:
    """Coverage shares and storage energy-to-power ratios per unit.

    `shares` and `ep_hours` map (bt, st, hpt) -> value; units absent from
    the maps are inactive. Base scenarios use a uniform share and a single
    active pump type, which `uniform()` builds.
    """

    shares: dict = field(default_factory=dict)  # (bt, st, hpt) -> fraction
    ep_hours: dict = field(default_factory=dict)  # (bt, st, hpt) -> hours

    def __post_init__(self):
        for key, s in self.shares.items():
            bt, st, hpt = key
            if bt not in BUILDING_TYPES or st not in SINKS or hpt not in HEAT_PUMP_TYPES:
                raise ValueError(f"unknown heat unit {key}")
            if not 0.0 <= s <= 1.0:
                raise ValueError(f"share {s} for {key} not in [0,1]")
            if self.ep_hours.get(key, 0.0) < 0.0:
                raise ValueError(f"ep {self.ep_hours[key]} for {key} negative")
        extra = set(self.ep_hours) - set(self.shares)
        if extra:
            raise ValueError(f"ep given for inactive units {sorted(extra)}")

    @classmethod
    def uniform(cls, share: float, ep: float, hpt: str = "air") -> "HeatConfig":
        keys = [(bt, st, hpt) for bt in BUILDING_TYPES for st in SINKS]
        return cls(shares={k: share for k in keys}, ep_hours={k: ep for k in keys})

    @property
    def active_units(self) -> list:
        return sorted(k for k, s in self.shares.items() if s > 0.0)

    @property
    def max_ep(self) -> float:
        return max((self.ep_hours.get(k, 0.0) for k in self.active_units), default=0.0)


@dataclass(frozen=True)
class FleetUnit:
    """Sized capacities of one (bt, st, hpt) unit in one country."""

    heat_output_capacity_mw_th: float
    heat_storage_capacity_mwh_th: float
    electricity_input_capacity_mw_el: float

    def __post_init__(self):
        for v in (
            self.heat_output_capacity_mw_th,
            self.heat_storage_capacity_mwh_th,
            self.electricity_input_capacity_mw_el,
        ):
            if v < 0:
                raise ValueError(f"negative fleet capacity {v}")


@dataclass(frozen=True)
class HeatPumpFleet:
    """Sized heat-pump capacities per country and (bt, st, hpt) unit."""

    units: dict = field(default_factory=dict)  # country -> {(bt,st,hpt): FleetUnit}

    def country_units(self, country: str) -> dict:
        return self.units.get(country, {})

    def country_totals_mw(self, country: str) -> tuple[float, float, float]:
        us = self.country_units(country).values()
        return (
            sum(u.heat_output_capacity_mw_th for u in us),
            sum(u.heat_storage_capacity_mwh_th for u in us),
            sum(u.electricity_input_capacity_mw_el for u in us),
        )

    def merge(self, other: "HeatPumpFleet") -> "HeatPumpFleet":
        overlap = set(self.units) & set(other.units)
        if overlap:
            raise ValueError(f"fleets overlap on {sorted(overlap)}")
        return HeatPumpFleet({**self.units, **other.units})


@dataclass(frozen=True)
class HeatTrajectory:
    """Hourly heat-module trajectories of one country.

    Arrays are keyed (bt, st, hpt); all four families share hour count.
    """

    heat_output_mw: dict  # HO
    heat_generated_mw: dict  # HI
    storage_level_mwh: dict  # HL
    electricity_mw: dict  # E

    @property
    def hours(self) -> int:
        for arr in self.heat_output_mw.values():
            return len(arr)
        return 0

    @property
    def keys(self) -> list:
        return sorted(self.heat_output_mw)

    def total_electricity_mw(self) -> np.ndarray:
        if not self.electricity_mw:
            return np.zeros(0)
        return np.sum([self.electricity_mw[k] for k in self.keys], axis=0)


def required_heat_output(config: HeatConfig, demand: HeatDemandSet) -> dict:
    """HO target per active unit: share times heat demand, elementwise (MW_th)."""
    out = {}
    for (bt, st, hpt), s in config.shares.items():
        profile = demand.profiles.get((bt, st))
        if profile is None:
            continue  # country without this demand category
        out[(bt, st, hpt)] = s * profile.values
    return out


def storage_step(hl_prev: float, hi_h: float, ho_h: float) -> float:
    """One step of the tank recursion: HL[h] = HL[h-1] + HI[h] - HO[h]."""
    return hl_prev + hi_h - ho_h


def electricity_for_heat(hi_h, cop_h):
    """Electricity drawn to generate HI at the given COP: E = HI / cop."""
    cop = np.asarray(cop_h, dtype=float)
    if (cop <= 0).any():
        raise DivisionDomain(f"cop must be > 0, got {cop.min()}")
    return np.asarray(hi_h, dtype=float) / cop


def size_fleet(config: HeatConfig, demand: HeatDemandSet, cops: CopSet) -> HeatPumpFleet:
    """Size one country's fleet to meet peak heat demand without storage.

    Per unit: heat-output capacity = max_h HO[h]; electricity-input
    capacity = max_h HO[h]/cop[h] (its own argmax); tank = ep * output.
    An empty demand set yields an all-zero (empty) fleet.
    """
    cops.check_aligned_with(demand)
    targets = required_heat_output(config, demand)
    units = {}
    for key, ho in sorted(targets.items()):
        bt, st, hpt = key
        cop_profile = cops.profiles.get((st, hpt))
        if cop_profile is None:
            raise AlignmentError(f"{demand.country}: no COP profile for ({st}, {hpt})")
        out_cap = float(ho.max())
        in_cap = float(electricity_for_heat(ho, cop_profile.values).max())
        ep = config.ep_hours.get(key, 0.0)
        units[key] = FleetUnit(
            heat_output_capacity_mw_th=out_cap,
            heat_storage_capacity_mwh_th=ep * out_cap,
            electricity_input_capacity_mw_el=in_cap,
        )
    return HeatPumpFleet({demand.country: units})


@dataclass(frozen=True)
class TrajectoryReport:
    """Max absolute violations of the heat-module equations, by check."""

    storage_recursion: float  # HL[h] - HL[h-1] - HI[h] + HO[h], cyclic
    storage_bounds: float  # HL outside [0, tank]
    cop_link: float  # HI - cop * E
    target_mismatch: float  # HO vs s*hd target
    capacity_violation: float  # HI/HO over output cap, E over input cap
    ep_zero_identity: float  # HO != HI where the unit has no tank

    @property
    def max_violation(self) -> float:
        return max(
            self.storage_recursion,
            self.storage_bounds,
            self.cop_link,
            self.target_mismatch,
            self.capacity_violation,
            self.ep_zero_identity,
        )

    def within(self, tol: float) -> bool:
        return self.max_violation <= tol


def validate_trajectory(
    traj: HeatTrajectory,
    fleet: HeatPumpFleet,
    targets: dict,
    cops: CopSet,
    country: str,
) -> TrajectoryReport:
    """Recompute every heat-module equation from raw trajectory values.

    Violations are data for the caller to judge, not exceptions.
    """
    units = fleet.country_units(country)
    rec = bnd = link = tgt = cap = epz = 0.0
    for key in traj.keys:
        ho = np.asarray(traj.heat_output_mw[key], dtype=float)
        hi = np.asarray(traj.heat_generated_mw[key], dtype=float)
        hl = np.asarray(traj.storage_level_mwh[key], dtype=float)
        e = np.asarray(traj.electricity_mw[key], dtype=float)
        if not (len(ho) == len(hi) == len(hl) == len(e)):
            raise AlignmentError(f"{country}/{key}: trajectory arrays differ in length")
        unit = units.get(key, FleetUnit(0.0, 0.0, 0.0))
        hl_prev = np.roll(hl, 1)  # cyclic boundary
        rec = max(rec, float(np.abs(hl - hl_prev - hi + ho).max(initial=0.0)))
        bnd = max(
            bnd,
            float(np.maximum(-hl, 0.0).max(initial=0.0)),
            float(np.maximum(hl - unit.heat_storage_capacity_mwh_th, 0.0).max(initial=0.0)),
        )
        _, st, hpt = key
        cop = cops.profiles[(st, hpt)].values
        link = max(link, float(np.abs(hi - cop * e).max(initial=0.0)))
        target = np.asarray(targets.get(key, np.zeros_like(ho)), dtype=float)
        tgt = max(tgt, float(np.abs(ho - target).max(initial=0.0)))
        cap = max(
            cap,
            float(np.maximum(hi - unit.heat_output_capacity_mw_th, 0.0).max(initial=0.0)),
            float(np.maximum(ho - unit.heat_output_capacity_mw_th, 0.0).max(initial=0.0)),
            float(np.maximum(e - unit.electricity_input_capacity_mw_el, 0.0).max(initial=0.0)),
        )
        if unit.heat_storage_capacity_mwh_th == 0.0:
            epz = max(epz, float(np.abs(ho - hi).max(initial=0.0)))
    return TrajectoryReport(
        storage_recursion=rec,
        storage_bounds=bnd,
        cop_link=link,
        target_mismatch=tgt,
        capacity_violation=cap,
        ep_zero_identity=epz,
    )


def fixed_trajectory(targets: dict, cops: CopSet) -> HeatTrajectory:
    """Trajectory of a storage-less fleet: HI = HO, HL = 0, E = HO/cop."""
    ho, hi, hl, e = {}, {}, {}, {}
    for key, target in targets.items():
        _, st, hpt = key
        cop = cops.profiles[(st, hpt)].values
        ho[key] = np.asarray(target, dtype=float)
        hi[key] = ho[key].copy()
        hl[key] = np.zeros_like(ho[key])
        e[key] = electricity_for_heat(ho[key], cop)
    return HeatTrajectory(ho, hi, hl, e)
