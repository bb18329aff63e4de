"""Cost arithmetic and assembly of the system cost-minimization LP.

One LP covers all countries and hours of a window. Within a country the
grid is a copper plate; between countries directed flows are capped by
fixed net-transfer capacities. The LP is built in GW/GWh/EUR units (data
enters in MW/MWh and is scaled here) to keep the matrix well conditioned.

Column families (catalog prefixes):

    cap[c,g]            generation capacity, GW
    gen[c,g,h]          generation, GW
    sce/scc/scd[c,s]    storage energy (GWh) / charge / discharge (GW) caps
    ch/dis/soc[c,s,h]   storage operation (GW, GW, GWh)
    spl[c,s,h]          spilled inflow of open PHS / reservoirs (GWh)
    flw[a>b,h]          directed cross-border flow, GW
    ho/hi/hl/e[c,unit,h] heat module: output, generated (GW_th),
                         tank level (GWh_th), electricity (GW_el)

Row families: bal (energy balance), gcap (availability), sdyn/scap/sin/sout
(storage), hdyn/hcop (heat), bio (annual bioenergy energy cap).

Capacity variables stay inside their bound table; pinned capacities
(lower == upper) contribute fixed O&M as a constant objective offset and
their hourly limits are folded into variable bounds. Expandable capacity
pays annuitized investment plus fixed O&M, prorated to the window length.
Heat units without a tank (ep = 0) have a fully determined electricity
profile, which is folded into the balance right-hand side instead of
emitting constant columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .heat import (
    HeatConfig,
    HeatPumpFleet,
    HeatTrajectory,
    electricity_for_heat,
    fixed_trajectory,
    required_heat_output,
)
from .ids import HOURS_PER_YEAR
from .lp import INF, LinearProgram
from .series import AlignmentError, ModelWindow
from .staticdata import BoundsTable, NtcMatrix, StorageSpec, TechnologySpec

MW_PER_GW = 1e3
EUR_PER_KEUR_MW = 1e6  # kEUR/MW -> EUR/GW


def annuity(overnight: float, rate: float, lifetime: float) -> float:
    """Constant yearly payment equivalent of an overnight cost.

    Units pass through (kEUR/MW in -> kEUR/MW/yr out). At rate 0 the
    annuity degenerates to straight-line overnight/lifetime.
    """
    if lifetime < 1:
        raise ValueError(f"lifetime {lifetime} < 1")
    if rate < 0:
        raise ValueError(f"negative interest rate {rate}")
    if rate == 0.0:
        return overnight / lifetime
    growth = (1.0 + rate) ** lifetime
    return overnight * rate * growth / (growth - 1.0)


def variable_cost(tech: TechnologySpec, co2_price: float) -> float:
    """Marginal generation cost in EUR/MWh_el, including carbon.

    Carbon content is per MWh of fuel, so both fuel and carbon costs are
    lifted by 1/efficiency to the electric side.
    """
    fuel = tech.fuel_cost_eur_per_mwh_fuel
    return (fuel + co2_price * tech.carbon_content_t_per_mwh_fuel) / tech.efficiency


def prorate_fixed_costs(annual: float, window_hours: int) -> float:
    """Scale a per-year cost to a window of `window_hours` hours."""
    if not 1 <= window_hours <= HOURS_PER_YEAR:
        raise ValueError(f"window hours {window_hours} not in [1, {HOURS_PER_YEAR}]")
    return annual * window_hours / HOURS_PER_YEAR


@dataclass(frozen=True)
class HeatBlock:
    """Heat-module inputs of one instance: config, per-country data, fleet."""

    config: HeatConfig
    demand: dict  # country -> HeatDemandSet
    cops: dict  # country -> CopSet
    fleet: HeatPumpFleet
    targets_mw: dict  # country -> {(bt,st,hpt): np.ndarray}

    @classmethod
    def build(cls, config: HeatConfig, demand: dict, cops: dict, fleet: HeatPumpFleet) -> "HeatBlock":
        targets = {c: required_heat_output(config, d) for c, d in demand.items()}
        return cls(config=config, demand=demand, cops=cops, fleet=fleet, targets_mw=targets)


@dataclass(frozen=True)
class SystemInstance:
    """Everything the LP assembler needs for one scenario cell."""

    name: str
    countries: tuple
    window: ModelWindow
    loads_mw: dict  # country -> np.ndarray
    availability: dict  # (country, tech) -> np.ndarray, VRE hourly factors
    inflow_mwh: dict  # country -> np.ndarray (may be missing -> zero)
    techs: dict  # tech -> TechnologySpec
    storages: dict  # storage -> StorageSpec
    bounds: BoundsTable
    ntc: NtcMatrix
    co2_price: float
    bioenergy_cap_mwh_yr: dict  # country -> MWh per full year
    heat: HeatBlock | None = None
    base_bounds: BoundsTable = None  # pristine bounds, for variant idempotence
    base_ntc: NtcMatrix = None

    def __post_init__(self):
        h = self.window.hours
        for c in self.countries:
            if len(self.loads_mw[c]) != h:
                raise AlignmentError(f"{c}: load length {len(self.loads_mw[c])} != {h}")
        for (c, g), af in self.availability.items():
            if len(af) != h:
                raise AlignmentError(f"{c}/{g}: availability length {len(af)} != {h}")
        for c, arr in self.inflow_mwh.items():
            if len(arr) != h:
                raise AlignmentError(f"{c}: inflow length {len(arr)} != {h}")
        if self.heat is not None:
            for c, targets in self.heat.targets_mw.items():
                for key, arr in targets.items():
                    if len(arr) != h:
                        raise AlignmentError(f"{c}/{key}: heat target length {len(arr)} != {h}")
        if self.base_bounds is None:
            object.__setattr__(self, "base_bounds", self.bounds)
        if self.base_ntc is None:
            object.__setattr__(self, "base_ntc", self.ntc)

    def replace_bounds(self, bounds: BoundsTable, ntc: NtcMatrix) -> "SystemInstance":
        return SystemInstance(
            name=self.name,
            countries=self.countries,
            window=self.window,
            loads_mw=self.loads_mw,
            availability=self.availability,
            inflow_mwh=self.inflow_mwh,
            techs=self.techs,
            storages=self.storages,
            bounds=bounds,
            ntc=ntc,
            co2_price=self.co2_price,
            bioenergy_cap_mwh_yr=self.bioenergy_cap_mwh_yr,
            heat=self.heat,
            base_bounds=self.base_bounds,
            base_ntc=self.base_ntc,
        )


def _unit_tag(unit) -> str:
    return ",".join(unit)


def build_model(instance: SystemInstance) -> LinearProgram:
    """Assemble the full cost-minimization LP of one instance."""
    H = instance.window.hours
    pror = H / HOURS_PER_YEAR
    lp = LinearProgram(name=instance.name)
    countries = sorted(instance.countries)
    techs = sorted(instance.techs)
    storages = sorted(instance.storages)

    # Balance bookkeeping: entries[(c,h)] built incrementally, RHS in GW.
    balance: dict = {(c, h): [] for c in countries for h in range(H)}
    rhs_gw = {c: np.asarray(instance.loads_mw[c], dtype=float) / MW_PER_GW for c in countries}

    # -- generation --------------------------------------------------------
    for c in countries:
        for g in techs:
            spec = instance.techs[g]
            b = instance.bounds.gen(c, g)
            if b.up == 0.0:
                continue  # technology absent in this country
            lo_gw, up_gw = b.low / MW_PER_GW, b.up / MW_PER_GW
            vcost = variable_cost(spec, instance.co2_price) * MW_PER_GW  # EUR/GWh
            if b.pinned:
                cap_obj = 0.0
            else:
                cap_obj = (
                    prorate_fixed_costs(
                        annuity(spec.overnight_cost_keur_per_mw, spec.interest_rate, spec.lifetime_yr)
                        + spec.fixed_cost_keur_per_mw_yr,
                        H,
                    )
                    * EUR_PER_KEUR_MW
                )
            cap = lp.add_col(f"cap[{c},{g}]", lo_gw, up_gw, cap_obj)
            if b.pinned:
                lp.offset += (
                    prorate_fixed_costs(spec.fixed_cost_keur_per_mw_yr, H) * EUR_PER_KEUR_MW * lo_gw
                )
            if spec.tech_class == "variable_renewable":
                af = instance.availability.get((c, g))
                if af is None:
                    raise AlignmentError(f"{c}/{g}: no availability series")
                factor = np.asarray(af, dtype=float)
            else:
                factor = np.full(H, spec.availability)
            for h in range(H):
                if b.pinned:
                    gcol = lp.add_col(f"gen[{c},{g},{h}]", 0.0, factor[h] * lo_gw, vcost)
                else:
                    gcol = lp.add_col(f"gen[{c},{g},{h}]", 0.0, INF, vcost)
                    lp.add_row(
                        f"gcap[{c},{g},{h}]", "L", 0.0, [(gcol, 1.0), (cap, -factor[h])]
                    )
                balance[(c, h)].append((gcol, 1.0))

    # -- electricity storage ------------------------------------------------
    for c in countries:
        # Inflow split between open PHS and reservoir by energy capacity.
        inflow_gwh = np.asarray(
            instance.inflow_mwh.get(c, np.zeros(H)), dtype=float
        ) / MW_PER_GW
        inflow_weights = {}
        if inflow_gwh.any():
            energies = {
                s: instance.bounds.sto_energy(c, s).up
                for s in ("phs_open", "reservoir")
                if s in instance.storages
                and np.isfinite(instance.bounds.sto_energy(c, s).up)
            }
            total = sum(energies.values())
            if total > 0:
                inflow_weights = {s: e / total for s, e in energies.items() if e > 0}

        for s in storages:
            spec: StorageSpec = instance.storages[s]
            b_in = instance.bounds.sto_in(c, s)
            b_out = instance.bounds.sto_out(c, s)
            b_en = instance.bounds.sto_energy(c, s)
            if b_out.up == 0.0 and b_en.up == 0.0:
                continue  # storage absent
            has_charge = b_in.up > 0.0

            def _cap_col(tag, b, overnight):
                if overnight is None:
                    overnight = 0.0
                obj = 0.0
                if not b.pinned:
                    obj = (
                        prorate_fixed_costs(
                            annuity(overnight, spec.interest_rate, spec.lifetime_yr), H
                        )
                        * EUR_PER_KEUR_MW
                    )
                return lp.add_col(f"{tag}[{c},{s}]", b.low / MW_PER_GW, b.up / MW_PER_GW, obj)

            en_cap = _cap_col("sce", b_en, spec.overnight_cost_energy_keur_per_mwh)
            ch_cap = _cap_col("scc", b_in, spec.overnight_cost_charge_keur_per_mw) if has_charge else None
            dis_cap = _cap_col("scd", b_out, spec.overnight_cost_discharge_keur_per_mw)

            mc_ch = spec.marginal_cost_charge_eur_per_mwh * MW_PER_GW
            mc_dis = spec.marginal_cost_discharge_eur_per_mwh * MW_PER_GW
            share = inflow_weights.get(s, 0.0)
            has_spill = s in ("phs_open", "reservoir") and share > 0.0

            ch_cols, dis_cols, soc_cols, spl_cols = [], [], [], []
            for h in range(H):
                if has_charge:
                    if b_in.pinned:
                        ch = lp.add_col(
                            f"ch[{c},{s},{h}]", 0.0, spec.availability * b_in.low / MW_PER_GW, mc_ch
                        )
                    else:
                        ch = lp.add_col(f"ch[{c},{s},{h}]", 0.0, INF, mc_ch)
                        lp.add_row(
                            f"sin[{c},{s},{h}]", "L", 0.0,
                            [(ch, 1.0), (ch_cap, -spec.availability)],
                        )
                    ch_cols.append(ch)
                    balance[(c, h)].append((ch, -1.0))
                if b_out.pinned:
                    dis = lp.add_col(
                        f"dis[{c},{s},{h}]", 0.0, spec.availability * b_out.low / MW_PER_GW, mc_dis
                    )
                else:
                    dis = lp.add_col(f"dis[{c},{s},{h}]", 0.0, INF, mc_dis)
                    lp.add_row(
                        f"sout[{c},{s},{h}]", "L", 0.0,
                        [(dis, 1.0), (dis_cap, -spec.availability)],
                    )
                dis_cols.append(dis)
                balance[(c, h)].append((dis, 1.0))
                if b_en.pinned:
                    soc = lp.add_col(f"soc[{c},{s},{h}]", 0.0, b_en.low / MW_PER_GW)
                else:
                    soc = lp.add_col(f"soc[{c},{s},{h}]", 0.0, INF)
                    lp.add_row(f"scap[{c},{s},{h}]", "L", 0.0, [(soc, 1.0), (en_cap, -1.0)])
                soc_cols.append(soc)
                if has_spill:
                    spl_cols.append(lp.add_col(f"spl[{c},{s},{h}]", 0.0, INF))

            # Cyclic state dynamics: soc[h] - soc[h-1] - ec*ch + dis/ed + spl = inflow.
            for h in range(H):
                prev = soc_cols[h - 1]  # h=0 wraps to the last hour
                entries = [(soc_cols[h], 1.0), (prev, -1.0), (dis_cols[h], 1.0 / spec.efficiency_discharge)]
                if has_charge:
                    entries.append((ch_cols[h], -spec.efficiency_charge))
                if has_spill:
                    entries.append((spl_cols[h], 1.0))
                lp.add_row(
                    f"sdyn[{c},{s},{h}]", "E", share * inflow_gwh[h], entries
                )

    # -- cross-border flows --------------------------------------------------
    inside = set(countries)
    for (a, b) in instance.ntc.pairs():
        if a not in inside or b not in inside:
            continue
        limit_gw = instance.ntc.get(a, b) / MW_PER_GW
        if limit_gw <= 0.0:
            continue
        for h in range(H):
            col = lp.add_col(f"flw[{a}>{b},{h}]", 0.0, limit_gw)
            balance[(a, h)].append((col, -1.0))
            balance[(b, h)].append((col, 1.0))

    # -- heat module ----------------------------------------------------------
    if instance.heat is not None:
        heat = instance.heat
        for c in countries:
            targets = heat.targets_mw.get(c, {})
            units = heat.fleet.country_units(c)
            cops = heat.cops.get(c)
            for unit in sorted(targets):
                bt, st, hpt = unit
                target_gw = np.asarray(targets[unit], dtype=float) / MW_PER_GW
                fu = units.get(unit)
                if fu is None:
                    raise AlignmentError(f"{c}/{unit}: no sized fleet unit")
                cop = cops.profiles[(st, hpt)].values
                ep = heat.config.ep_hours.get(unit, 0.0)
                if ep == 0.0:
                    # No tank: E is data; fold into the balance RHS.
                    rhs_gw[c] = rhs_gw[c] + electricity_for_heat(target_gw, cop)
                    continue
                tag = _unit_tag(unit)
                out_cap_gw = fu.heat_output_capacity_mw_th / MW_PER_GW
                tank_gwh = fu.heat_storage_capacity_mwh_th / MW_PER_GW
                in_cap_gw = fu.electricity_input_capacity_mw_el / MW_PER_GW
                ho_cols, hi_cols, hl_cols, e_cols = [], [], [], []
                for h in range(H):
                    ho_cols.append(
                        lp.add_col(f"ho[{c},{tag},{h}]", target_gw[h], target_gw[h])
                    )
                    hi_cols.append(lp.add_col(f"hi[{c},{tag},{h}]", 0.0, out_cap_gw))
                    hl_cols.append(lp.add_col(f"hl[{c},{tag},{h}]", 0.0, tank_gwh))
                    e = lp.add_col(f"e[{c},{tag},{h}]", 0.0, in_cap_gw)
                    e_cols.append(e)
                    balance[(c, h)].append((e, -1.0))
                for h in range(H):
                    lp.add_row(
                        f"hdyn[{c},{tag},{h}]", "E", 0.0,
                        [
                            (hl_cols[h], 1.0),
                            (hl_cols[h - 1], -1.0),
                            (hi_cols[h], -1.0),
                            (ho_cols[h], 1.0),
                        ],
                    )
                    lp.add_row(
                        f"hcop[{c},{tag},{h}]", "E", 0.0,
                        [(hi_cols[h], 1.0), (e_cols[h], -cop[h])],
                    )

    # -- energy balance ---------------------------------------------------------
    for c in countries:
        for h in range(H):
            lp.add_row(f"bal[{c},{h}]", "E", rhs_gw[c][h], balance[(c, h)])

    # -- annual bioenergy energy cap ---------------------------------------------
    for c in countries:
        cap_mwh = instance.bioenergy_cap_mwh_yr.get(c)
        if cap_mwh is None or not np.isfinite(cap_mwh):
            continue
        cols = [lp.col(f"gen[{c},bioenergy,{h}]") for h in range(H) if lp.has_col(f"gen[{c},bioenergy,{h}]")]
        if not cols:
            continue
        lp.add_row(
            f"bio[{c}]", "L", prorate_fixed_costs(cap_mwh, H) / MW_PER_GW,
            [(col, 1.0) for col in cols],
        )

    return lp.freeze()


# ---------------------------------------------------------------------------
# Solution extraction
# ---------------------------------------------------------------------------


@dataclass
class SolvedSystem:
    """Model-unit solution mapped back to MW/MWh physical quantities."""

    instance: SystemInstance
    capacities_mw: dict  # country -> {(kind, name): value}; energies in MWh
    generation_mw: dict  # (country, tech) -> np.ndarray
    charge_mw: dict  # (country, storage) -> np.ndarray
    discharge_mw: dict
    soc_mwh: dict
    spill_mwh: dict
    flows_mw: dict  # (from, to) -> np.ndarray
    heat: dict  # country -> HeatTrajectory
    heat_supplied_mwh: float  # total HO over the window
    cost_breakdown: dict  # investment / fixed_om / variable / storage_marginal / total

    def hp_load_mw(self, country: str) -> np.ndarray:
        traj = self.heat.get(country)
        if traj is None or not traj.electricity_mw:
            return np.zeros(self.instance.window.hours)
        return traj.total_electricity_mw()


def extract_solved(instance: SystemInstance, lp, solution) -> SolvedSystem:
    """Read a solved LP back into physical quantities and a cost breakdown."""
    H = instance.window.hours
    values = solution.values
    gen, ch, dis, soc, spl, flw = {}, {}, {}, {}, {}, {}
    caps: dict = {c: {} for c in instance.countries}
    ho_cols: dict = {}
    hi_cols: dict = {}
    hl_cols: dict = {}
    e_cols: dict = {}

    def _hourly(store, key, h, val):
        arr = store.get(key)
        if arr is None:
            arr = store[key] = np.zeros(H)
        arr[h] = val

    for idx, name in enumerate(lp.col_names):
        val = float(values[idx])
        head, tail = name.split("[", 1)
        parts = tail[:-1].split(",")
        if head == "gen":
            _hourly(gen, (parts[0], parts[1]), int(parts[2]), val * MW_PER_GW)
        elif head == "cap":
            caps[parts[0]][("generation", parts[1])] = val * MW_PER_GW
        elif head == "ch":
            _hourly(ch, (parts[0], parts[1]), int(parts[2]), val * MW_PER_GW)
        elif head == "dis":
            _hourly(dis, (parts[0], parts[1]), int(parts[2]), val * MW_PER_GW)
        elif head == "soc":
            _hourly(soc, (parts[0], parts[1]), int(parts[2]), val * MW_PER_GW)
        elif head == "spl":
            _hourly(spl, (parts[0], parts[1]), int(parts[2]), val * MW_PER_GW)
        elif head == "sce":
            caps[parts[0]][("storage_energy", parts[1])] = val * MW_PER_GW
        elif head == "scc":
            caps[parts[0]][("storage_charge", parts[1])] = val * MW_PER_GW
        elif head == "scd":
            caps[parts[0]][("storage_discharge", parts[1])] = val * MW_PER_GW
        elif head == "flw":
            a, b = parts[0].split(">")
            _hourly(flw, (a, b), int(parts[1]), val * MW_PER_GW)
        elif head == "ho":
            _hourly(ho_cols, (parts[0], (parts[1], parts[2], parts[3])), int(parts[4]), val * MW_PER_GW)
        elif head == "hi":
            _hourly(hi_cols, (parts[0], (parts[1], parts[2], parts[3])), int(parts[4]), val * MW_PER_GW)
        elif head == "hl":
            _hourly(hl_cols, (parts[0], (parts[1], parts[2], parts[3])), int(parts[4]), val * MW_PER_GW)
        elif head == "e":
            _hourly(e_cols, (parts[0], (parts[1], parts[2], parts[3])), int(parts[4]), val * MW_PER_GW)

    # Heat trajectories: column-backed units plus folded (ep = 0) units.
    heat: dict = {}
    heat_supplied = 0.0
    if instance.heat is not None:
        hb = instance.heat
        for c in sorted(instance.countries):
            targets = hb.targets_mw.get(c, {})
            if not targets:
                continue
            ho_d, hi_d, hl_d, e_d = {}, {}, {}, {}
            cops = hb.cops[c]
            for unit in sorted(targets):
                if (c, unit) in ho_cols:
                    ho_d[unit] = ho_cols[(c, unit)]
                    hi_d[unit] = hi_cols[(c, unit)]
                    hl_d[unit] = hl_cols[(c, unit)]
                    e_d[unit] = e_cols[(c, unit)]
                else:
                    fixed = fixed_trajectory({unit: targets[unit]}, cops)
                    ho_d[unit] = fixed.heat_output_mw[unit]
                    hi_d[unit] = fixed.heat_generated_mw[unit]
                    hl_d[unit] = fixed.storage_level_mwh[unit]
                    e_d[unit] = fixed.electricity_mw[unit]
                heat_supplied += float(ho_d[unit].sum())
            heat[c] = HeatTrajectory(ho_d, hi_d, hl_d, e_d)
            out_cap, tank, in_cap = hb.fleet.country_totals_mw(c)
            caps[c][("heat_output", "heat_pump")] = out_cap
            caps[c][("heat_storage_energy", "heat_pump")] = tank
            caps[c][("heat_electricity", "heat_pump")] = in_cap

    breakdown = cost_breakdown(instance, caps, gen, ch, dis)
    return SolvedSystem(
        instance=instance,
        capacities_mw=caps,
        generation_mw=gen,
        charge_mw=ch,
        discharge_mw=dis,
        soc_mwh=soc,
        spill_mwh=spl,
        flows_mw=flw,
        heat=heat,
        heat_supplied_mwh=heat_supplied,
        cost_breakdown=breakdown,
    )


def cost_breakdown(instance: SystemInstance, caps: dict, gen: dict, ch: dict, dis: dict) -> dict:
    """Recompute objective components from physical quantities (EUR).

    Mirrors the assembler's cost logic so investment + fixed_om +
    variable + storage_marginal reproduces the LP objective (additivity
    is asserted in tests, not here).
    """
    H = instance.window.hours
    invest = fixed_om = var = marginal = 0.0
    for c in sorted(instance.countries):
        for g in sorted(instance.techs):
            spec = instance.techs[g]
            b = instance.bounds.gen(c, g)
            if b.up == 0.0:
                continue
            cap_gw = caps[c].get(("generation", g), b.low) / MW_PER_GW
            if b.pinned:
                fixed_om += (
                    prorate_fixed_costs(spec.fixed_cost_keur_per_mw_yr, H)
                    * EUR_PER_KEUR_MW * (b.low / MW_PER_GW)
                )
            else:
                ann = annuity(spec.overnight_cost_keur_per_mw, spec.interest_rate, spec.lifetime_yr)
                invest += prorate_fixed_costs(ann, H) * EUR_PER_KEUR_MW * cap_gw
                fixed_om += prorate_fixed_costs(spec.fixed_cost_keur_per_mw_yr, H) * EUR_PER_KEUR_MW * cap_gw
            series = gen.get((c, g))
            if series is not None:
                var += variable_cost(spec, instance.co2_price) * float(series.sum())
        for s in sorted(instance.storages):
            spec = instance.storages[s]
            b_in = instance.bounds.sto_in(c, s)
            b_out = instance.bounds.sto_out(c, s)
            b_en = instance.bounds.sto_energy(c, s)
            if b_out.up == 0.0 and b_en.up == 0.0:
                continue
            for b, kind, overnight in (
                (b_en, "storage_energy", spec.overnight_cost_energy_keur_per_mwh),
                (b_in, "storage_charge", spec.overnight_cost_charge_keur_per_mw),
                (b_out, "storage_discharge", spec.overnight_cost_discharge_keur_per_mw),
            ):
                if b.pinned or (kind == "storage_charge" and b_in.up == 0.0):
                    continue
                cap_gw = caps[c].get((kind, s), 0.0) / MW_PER_GW
                ann = annuity(overnight or 0.0, spec.interest_rate, spec.lifetime_yr)
                invest += prorate_fixed_costs(ann, H) * EUR_PER_KEUR_MW * cap_gw
            charge = ch.get((c, s))
            if charge is not None:
                marginal += spec.marginal_cost_charge_eur_per_mwh * float(charge.sum())
            disch = dis.get((c, s))
            if disch is not None:
                marginal += spec.marginal_cost_discharge_eur_per_mwh * float(disch.sum())
    total = invest + fixed_om + var + marginal
    return {
        "investment": invest,
        "fixed_om": fixed_om,
        "variable": var,
        "storage_marginal": marginal,
        "total": total,
    }
