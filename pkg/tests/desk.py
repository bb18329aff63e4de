"""Shared builders for small hand-checkable instances used across tests."""

from __future__ import annotations

import numpy as np

from heatgrid.heat import HeatConfig, size_fleet
from heatgrid.model import HeatBlock, SystemInstance
from heatgrid.series import CopSet, HeatDemandSet, HourlySeries, ModelWindow, utc
from heatgrid.staticdata import Bounds, BoundsTable, NtcMatrix, TechnologySpec

INF = float("inf")

START = utc(2009, 7, 1)


def tech(
    name,
    varcost_fuel=20.0,
    efficiency=1.0,
    overnight=800.0,
    fixed=20.0,
    lifetime=25,
    availability=1.0,
    carbon=0.0,
    tech_class="non_renewable",
):
    return TechnologySpec(
        name=name,
        tech_class=tech_class,
        interest_rate=0.04,
        lifetime_yr=lifetime,
        availability=availability,
        overnight_cost_keur_per_mw=overnight,
        fixed_cost_keur_per_mw_yr=fixed,
        efficiency=efficiency,
        carbon_content_t_per_mwh_fuel=carbon,
        fuel_cost_eur_per_mwh_fuel=varcost_fuel,
    )


def series(country, quantity, values):
    return HourlySeries(country, quantity, START, np.asarray(values, dtype=float))


def heat_block(country, share, ep, hd_values, cop_values):
    demand = HeatDemandSet(country, {("single_family", "space"): series(country, "heat_demand_MWth", hd_values)})
    cops = CopSet(country, {("space", "air"): series(country, "cop", cop_values)})
    key = ("single_family", "space", "air")
    config = HeatConfig(shares={key: share}, ep_hours={key: ep})
    fleet = size_fleet(config, demand, cops)
    return HeatBlock.build(config, {country: demand}, {country: cops}, fleet)


def instance(
    name,
    loads_mw,
    techs,
    gen_bounds,
    availability=None,
    ntc_mw=None,
    heat=None,
    co2=150.0,
    bio_caps=None,
):
    """Storage-free instance. `gen_bounds`: (country, tech) -> (lo, up) MW."""
    countries = tuple(sorted(loads_mw))
    hours = len(next(iter(loads_mw.values())))
    bounds = BoundsTable(
        gen_mw={key: Bounds(lo, up) for key, (lo, up) in gen_bounds.items()},
        storage_power_in_mw={},
        storage_power_out_mw={},
        storage_energy_mwh={},
    )
    return SystemInstance(
        name=name,
        countries=countries,
        window=ModelWindow(2009, 0, hours),
        loads_mw={c: np.asarray(v, dtype=float) for c, v in loads_mw.items()},
        availability={k: np.asarray(v, dtype=float) for k, v in (availability or {}).items()},
        inflow_mwh={},
        techs=techs,
        storages={},
        bounds=bounds,
        ntc=NtcMatrix(ntc_mw or {}),
        co2_price=co2,
        bioenergy_cap_mwh_yr=bio_caps or {},
        heat=heat,
    )


# A small catalog of dispatchables with distinct marginal costs.
TECH_CATALOG = {
    "nuclear": tech("nuclear", varcost_fuel=1.7, efficiency=0.34, overnight=6000, fixed=30, lifetime=40, availability=0.91),
    "ccgt": tech("ccgt", varcost_fuel=26.0, efficiency=0.61, overnight=830, fixed=28, carbon=0.2, availability=0.96),
    "oil": tech("oil", varcost_fuel=41.7, efficiency=0.35, overnight=400, fixed=7, carbon=0.27, availability=0.9),
    "other": tech("other", varcost_fuel=18.1, efficiency=0.35, overnight=1500, fixed=30, carbon=0.35, availability=0.9),
}


def random_desk_instance(seed: int) -> SystemInstance:
    """1-2 countries, 4-24 hours, <= 2 free capacities, no storage.

    Feasible by construction: every country either owns a free capacity or
    is pinned above its own peak effective load.
    """
    rng = np.random.default_rng(seed)
    n_countries = int(rng.integers(1, 3))
    countries = ["DE", "FR"][:n_countries]
    hours = int(rng.integers(4, 25))
    tech_names = list(rng.permutation(sorted(TECH_CATALOG)))[: int(rng.integers(2, 5))]
    techs = {name: TECH_CATALOG[name] for name in tech_names}

    loads = {
        c: rng.uniform(400.0, 2400.0, hours).round(1) for c in countries
    }
    peak = {c: float(loads[c].max()) for c in countries}

    n_free = int(rng.integers(1, 3))
    free_slots = [(c, g) for c in countries for g in tech_names]
    free_keys = [free_slots[i] for i in rng.choice(len(free_slots), size=min(n_free, len(free_slots)), replace=False)]
    free_countries = {c for c, _ in free_keys}

    gen_bounds = {}
    availability = {}
    for c in countries:
        for g in tech_names:
            if (c, g) in free_keys:
                gen_bounds[(c, g)] = (0.0, INF)
            elif rng.random() < 0.5:
                gen_bounds[(c, g)] = (0.0, 0.0)  # absent
            else:
                cap = float(rng.uniform(0.1, 0.6) * peak[c])
                gen_bounds[(c, g)] = (cap, cap)
        if c not in free_countries:
            # No expandable capacity here: pin a backstop above own peak.
            cap = 1.3 * peak[c] / 0.9
            gen_bounds[(c, "backstop")] = (cap, cap)
        # A pinned PV-like VRE with an hourly profile in half the cases.
        if rng.random() < 0.5:
            cap = float(rng.uniform(0.2, 0.8) * peak[c])
            gen_bounds[(c, "solar_pv")] = (cap, cap)
            availability[(c, "solar_pv")] = rng.uniform(0.0, 1.0, hours).round(3)

    techs = dict(techs)
    if any(("backstop" == g) for (_, g) in gen_bounds):
        techs["backstop"] = tech("backstop", varcost_fuel=55.0, efficiency=0.4, overnight=500, fixed=10, availability=0.9)
    if any(("solar_pv" == g) for (_, g) in gen_bounds):
        techs["solar_pv"] = tech(
            "solar_pv", varcost_fuel=0.0, efficiency=1.0, overnight=597, fixed=10,
            lifetime=40, availability=1.0, tech_class="variable_renewable",
        )

    ntc = {}
    if n_countries == 2 and rng.random() < 0.7:
        mw = float(rng.uniform(0.0, 0.5) * min(peak.values()))
        ntc = {("DE", "FR"): mw, ("FR", "DE"): mw}

    heat = None
    if rng.random() < 0.4:
        c = countries[0]
        hd = rng.uniform(0.0, 0.5, hours) * peak[c]
        cop = rng.uniform(1.8, 3.5, hours)
        heat = heat_block(c, share=0.25, ep=0.0, hd_values=hd.round(1), cop_values=cop.round(2))

    return instance(
        name=f"desk{seed}",
        loads_mw=loads,
        techs=techs,
        gen_bounds=gen_bounds,
        availability=availability,
        ntc_mw=ntc,
        heat=heat,
    )
