"""Static technology, cost, and bound data; bundled default dataset.

The bundled file ``data/static.yaml`` carries the cost/technology table and
the capacity-bounds table verbatim (values exactly as printed in the source
tables, including two quirks kept on purpose):

* Luxembourg run-of-river is bounded [0.04, 38] GW -- a strikingly wide
  range next to every other (pinned) hydro entry. Reproduced as printed.
* Germany lignite prints lower 14.6 / upper 14.5 GW. The table pins lignite
  everywhere else, so the model normalizer treats a lower > upper pair
  within print precision (0.1 GW) as pinned at the lower value; anything
  wider raises :class:`InfeasibleBounds`.

Schema of ``static.yaml`` (units in key names; GW/GWh/TWh as printed):

    schema: heatgrid-static-v1
    co2_price_eur_per_t: <number>
    generation: {tech: {class, interest_rate, lifetime_yr, availability,
                        overnight_cost_keur_per_mw, fixed_cost_keur_per_mw_yr,
                        efficiency, carbon_content_t_per_mwh_fuel,
                        fuel_cost_eur_per_mwh_fuel}}
    storage: {row: {interest_rate, lifetime_yr, availability,
                    overnight_cost_energy_keur_per_mwh,
                    overnight_cost_charge_keur_per_mw,
                    overnight_cost_discharge_keur_per_mw (null = none printed),
                    efficiency_charge, efficiency_discharge,
                    marginal_cost_charge_eur_per_mwh,
                    marginal_cost_discharge_eur_per_mwh}}
      where row 'phs' covers both the open and the closed pumped-hydro
      variants (one printed row) and is expanded by the loader.
    capacity_bounds_gw: {country: {row: {low, up}}}
      rows: generation techs plus li_ion_power_in_out, li_ion_energy_gwh,
      p2g2p_power_in_out, p2g2p_energy_gwh, phs_closed_power_in/out,
      phs_closed_energy_gwh, phs_open_power_in/out, phs_open_energy_gwh,
      reservoir_power_out, reservoir_energy_twh.
    defaults:   # artifact-chosen values that the source tables do not print
      bioenergy_generation_cap_mwh_yr: {country: MWh per year}
      ntc_mw: {from_country: {to_country: MW}}   # directed, explicit

The sidecar ``data/heat_pump_capacities.csv`` is the reference heat-pump
fleet table (GW_th / GWh_th / GW_el per country plus an ``All`` total row).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from .ids import COUNTRIES, STORAGES, TECH_CLASS, TECHNOLOGIES

SCHEMA = "heatgrid-static-v1"

# Printed tables round capacities to 0.1 GW; a lower/upper contradiction
# within this precision is a rounding artifact, not an infeasible input.
PRINT_PRECISION_GW = 0.1


class StaticDataError(ValueError):
    pass


class InfeasibleBounds(StaticDataError):
    """A capacity lower bound genuinely exceeds its upper bound."""


@dataclass(frozen=True)
class TechnologySpec:
    """Cost and technical parameters of one generation technology."""

    name: str
    tech_class: str  # variable_renewable | dispatchable_renewable | non_renewable
    interest_rate: float  # fraction per year
    lifetime_yr: float
    availability: float  # fraction, derates dispatchable capacity uniformly
    overnight_cost_keur_per_mw: float
    fixed_cost_keur_per_mw_yr: float
    efficiency: float  # MWh_el per MWh_fuel
    carbon_content_t_per_mwh_fuel: float
    fuel_cost_eur_per_mwh_fuel: float

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise StaticDataError(f"{self.name}: efficiency {self.efficiency} not in (0,1]")
        if not 0 < self.availability <= 1:
            raise StaticDataError(f"{self.name}: availability {self.availability} not in (0,1]")
        if self.lifetime_yr < 1:
            raise StaticDataError(f"{self.name}: lifetime {self.lifetime_yr} < 1")


@dataclass(frozen=True)
class StorageSpec:
    """Cost and technical parameters of one electricity storage."""

    name: str
    interest_rate: float
    lifetime_yr: float
    availability: float  # applied to charge/discharge power limits
    overnight_cost_energy_keur_per_mwh: float
    overnight_cost_charge_keur_per_mw: float
    overnight_cost_discharge_keur_per_mw: float | None  # None: no cost printed
    efficiency_charge: float
    efficiency_discharge: float
    marginal_cost_charge_eur_per_mwh: float
    marginal_cost_discharge_eur_per_mwh: float

    def __post_init__(self):
        for eff in (self.efficiency_charge, self.efficiency_discharge):
            if not 0 < eff <= 1:
                raise StaticDataError(f"{self.name}: efficiency {eff} not in (0,1]")


@dataclass(frozen=True)
class Bounds:
    low: float
    up: float

    def __post_init__(self):
        if self.low > self.up:
            raise InfeasibleBounds(f"lower {self.low} > upper {self.up}")
        if self.low < 0:
            raise StaticDataError(f"negative lower bound {self.low}")

    @property
    def pinned(self) -> bool:
        return self.low == self.up


def _normalize_pair(low: float, up: float, context: str) -> Bounds:
    """Build Bounds, healing print-precision lower>upper contradictions."""
    if low > up:
        if low - up <= PRINT_PRECISION_GW * 1000 + 1e-9:  # MW here
            return Bounds(low, low)  # pinned technology, rounding artifact
        raise InfeasibleBounds(f"{context}: lower {low} > upper {up}")
    return Bounds(low, up)


@dataclass(frozen=True)
class BoundsTable:
    """Capacity bounds in MW / MWh, normalized and model-ready.

    Fixed technologies carry ``low == up``. Keys absent from the table map
    to (0, 0): the technology does not exist in that country.
    """

    gen_mw: dict  # (country, tech) -> Bounds
    storage_power_in_mw: dict  # (country, storage) -> Bounds
    storage_power_out_mw: dict
    storage_energy_mwh: dict

    def gen(self, country: str, tech: str) -> Bounds:
        return self.gen_mw.get((country, tech), Bounds(0.0, 0.0))

    def sto_in(self, country: str, sto: str) -> Bounds:
        return self.storage_power_in_mw.get((country, sto), Bounds(0.0, 0.0))

    def sto_out(self, country: str, sto: str) -> Bounds:
        return self.storage_power_out_mw.get((country, sto), Bounds(0.0, 0.0))

    def sto_energy(self, country: str, sto: str) -> Bounds:
        return self.storage_energy_mwh.get((country, sto), Bounds(0.0, 0.0))

    def replace(self, gen=None, sto_in=None, sto_out=None, sto_energy=None) -> "BoundsTable":
        return BoundsTable(
            gen_mw={**self.gen_mw, **(gen or {})},
            storage_power_in_mw={**self.storage_power_in_mw, **(sto_in or {})},
            storage_power_out_mw={**self.storage_power_out_mw, **(sto_out or {})},
            storage_energy_mwh={**self.storage_energy_mwh, **(sto_energy or {})},
        )


@dataclass(frozen=True)
class NtcMatrix:
    """Directed net-transfer capacities in MW; absent pair means 0."""

    limits_mw: dict  # (from, to) -> MW

    def __post_init__(self):
        for (a, b), mw in self.limits_mw.items():
            if mw < 0:
                raise StaticDataError(f"NTC {a}->{b} negative: {mw}")

    def get(self, from_country: str, to_country: str) -> float:
        return self.limits_mw.get((from_country, to_country), 0.0)

    def pairs(self) -> list:
        return sorted(self.limits_mw)

    @property
    def empty(self) -> bool:
        return not self.limits_mw

    def restrict(self, countries) -> "NtcMatrix":
        keep = set(countries)
        return NtcMatrix(
            {(a, b): mw for (a, b), mw in self.limits_mw.items() if a in keep and b in keep}
        )


@dataclass(frozen=True)
class StaticData:
    """Parsed static dataset: raw cells plus model-ready structures."""

    raw: dict
    technologies: dict  # tech -> TechnologySpec
    storages: dict  # storage -> StorageSpec
    bounds: BoundsTable
    ntc: NtcMatrix
    co2_price_eur_per_t: float
    bioenergy_cap_mwh_yr: dict  # country -> MWh/yr


_GEN_FIELDS = (
    "interest_rate",
    "lifetime_yr",
    "availability",
    "overnight_cost_keur_per_mw",
    "fixed_cost_keur_per_mw_yr",
    "efficiency",
    "carbon_content_t_per_mwh_fuel",
    "fuel_cost_eur_per_mwh_fuel",
)

_STO_FIELDS = (
    "interest_rate",
    "lifetime_yr",
    "availability",
    "overnight_cost_energy_keur_per_mwh",
    "overnight_cost_charge_keur_per_mw",
    "overnight_cost_discharge_keur_per_mw",
    "efficiency_charge",
    "efficiency_discharge",
    "marginal_cost_charge_eur_per_mwh",
    "marginal_cost_discharge_eur_per_mwh",
)

# Storage rows as printed -> model storages they parameterize.
_STORAGE_ROW_MAP = {
    "li_ion": ("li_ion",),
    "p2g2p": ("p2g2p",),
    "phs": ("phs_closed", "phs_open"),
    "reservoir": ("reservoir",),
}


def bundled_static_path() -> Path:
    return Path(resources.files("heatgrid").joinpath("data/static.yaml"))


def bundled_fleet_table_path() -> Path:
    return Path(resources.files("heatgrid").joinpath("data/heat_pump_capacities.csv"))


def emit_static(raw: dict) -> str:
    """Canonical YAML text of a raw static dataset (byte-stable)."""
    return yaml.safe_dump(raw, sort_keys=True, default_flow_style=False, width=100)


def load_static(path=None) -> StaticData:
    """Load and validate a static dataset (bundled one by default)."""
    path = Path(path) if path is not None else bundled_static_path()
    raw = yaml.safe_load(path.read_text())
    if raw.get("schema") != SCHEMA:
        raise StaticDataError(f"{path}: schema {raw.get('schema')!r} != {SCHEMA!r}")

    technologies = {}
    for tech, row in raw["generation"].items():
        if tech not in TECHNOLOGIES:
            raise StaticDataError(f"unknown generation technology {tech!r}")
        if row["class"] != TECH_CLASS[tech]:
            raise StaticDataError(f"{tech}: class {row['class']} != {TECH_CLASS[tech]}")
        technologies[tech] = TechnologySpec(
            name=tech, tech_class=row["class"], **{f: float(row[f]) for f in _GEN_FIELDS}
        )
    missing = set(TECHNOLOGIES) - set(technologies)
    if missing:
        raise StaticDataError(f"generation table missing {sorted(missing)}")

    storages = {}
    for row_name, row in raw["storage"].items():
        targets = _STORAGE_ROW_MAP.get(row_name)
        if targets is None:
            raise StaticDataError(f"unknown storage row {row_name!r}")
        fields = {
            f: (None if row[f] is None else float(row[f]))
            for f in _STO_FIELDS
        }
        for target in targets:
            storages[target] = StorageSpec(name=target, **fields)
    missing = set(STORAGES) - set(storages)
    if missing:
        raise StaticDataError(f"storage table missing {sorted(missing)}")

    gen_mw, sto_in, sto_out, sto_energy = {}, {}, {}, {}
    for country, rows in raw["capacity_bounds_gw"].items():
        if country not in COUNTRIES:
            raise StaticDataError(f"unknown country {country!r} in bounds table")
        for key, cell in rows.items():
            low, up = float(cell["low"]), float(cell["up"])
            if key in TECHNOLOGIES:
                gen_mw[(country, key)] = _normalize_pair(
                    low * 1e3, up * 1e3, f"{country}/{key}"
                )
            elif key.endswith("_power_in_out"):
                sto = key[: -len("_power_in_out")]
                b = _normalize_pair(low * 1e3, up * 1e3, f"{country}/{key}")
                sto_in[(country, sto)] = b
                sto_out[(country, sto)] = b
            elif key.endswith("_power_in"):
                sto = key[: -len("_power_in")]
                sto_in[(country, sto)] = _normalize_pair(low * 1e3, up * 1e3, f"{country}/{key}")
            elif key.endswith("_power_out"):
                sto = key[: -len("_power_out")]
                sto_out[(country, sto)] = _normalize_pair(low * 1e3, up * 1e3, f"{country}/{key}")
            elif key.endswith("_energy_gwh"):
                sto = key[: -len("_energy_gwh")]
                sto_energy[(country, sto)] = _normalize_pair(
                    low * 1e3, up * 1e3, f"{country}/{key}"
                )
            elif key.endswith("_energy_twh"):
                sto = key[: -len("_energy_twh")]
                sto_energy[(country, sto)] = _normalize_pair(
                    low * 1e6, up * 1e6, f"{country}/{key}"
                )
            else:
                raise StaticDataError(f"unknown bounds row {key!r} for {country}")

    defaults = raw.get("defaults", {})
    ntc_limits = {}
    for frm, tos in defaults.get("ntc_mw", {}).items():
        for to, mw in tos.items():
            ntc_limits[(frm, to)] = float(mw)
    bio_caps = {c: float(v) for c, v in defaults.get("bioenergy_generation_cap_mwh_yr", {}).items()}

    return StaticData(
        raw=raw,
        technologies=technologies,
        storages=storages,
        bounds=BoundsTable(gen_mw, sto_in, sto_out, sto_energy),
        ntc=NtcMatrix(ntc_limits),
        co2_price_eur_per_t=float(raw["co2_price_eur_per_t"]),
        bioenergy_cap_mwh_yr=bio_caps,
    )


def load_fleet_table(path=None) -> dict:
    """Reference heat-pump fleet table: country -> (GW_th, GWh_th, GW_el)."""
    path = Path(path) if path is not None else bundled_fleet_table_path()
    out = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected = ["country", "heat_output_gw_th", "heat_storage_gwh_th", "electricity_input_gw_el"]
        if header != expected:
            raise StaticDataError(f"{path}: header {header} != {expected}")
        for row in reader:
            out[row[0]] = (float(row[1]), float(row[2]), float(row[3]))
    return out


def emit_fleet_table(table: dict) -> str:
    """Canonical CSV text of a fleet reference table."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["country", "heat_output_gw_th", "heat_storage_gwh_th", "electricity_input_gw_el"]
    )
    for country, (out_gw, store_gwh, in_gw) in table.items():
        writer.writerow([country, _fmt(out_gw), _fmt(store_gwh), _fmt(in_gw)])
    return buf.getvalue()


def _fmt(x: float) -> str:
    # one decimal, matching the printed table
    return f"{x:.1f}"
