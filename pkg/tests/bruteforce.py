"""Independent oracle: capacity grid search + greedy merit-order dispatch.

Recomputes everything from raw instance data in MW/EUR (the LP assembler
works in GW), so the two routes share no arithmetic. Only storage-free
instances with at most two expandable capacities and tank-less heat are
supported; with one or two countries, cheapest-first dispatch serving the
own country before exporting over the remaining NTC is exact.
"""

from __future__ import annotations

import numpy as np

from heatgrid.ids import HOURS_PER_YEAR

INF = float("inf")


def _annuity(overnight, rate, lifetime):
    if rate == 0:
        return overnight / lifetime
    g = (1.0 + rate) ** lifetime
    return overnight * rate * g / (g - 1.0)


def brute_force_objective(inst, step_frac: float = 0.01, top_frac: float = 1.6) -> float:
    """Minimum total cost over a capacity grid (EUR), infeasible -> inf."""
    H = inst.window.hours
    pror = H / HOURS_PER_YEAR
    countries = sorted(inst.countries)
    assert len(countries) <= 2, "oracle handles at most two countries"
    assert not inst.storages, "oracle does not dispatch storage"

    eff_load = {c: np.asarray(inst.loads_mw[c], dtype=float).copy() for c in countries}
    if inst.heat is not None:
        for c, targets in inst.heat.targets_mw.items():
            cops = inst.heat.cops[c]
            for (bt, st, hpt), target in targets.items():
                assert inst.heat.config.ep_hours.get((bt, st, hpt), 0.0) == 0.0
                eff_load[c] = eff_load[c] + np.asarray(target) / cops.profiles[(st, hpt)].values

    units = []  # (varcost, country, tech, cap_mw or None, factor[H], free_index)
    free_specs = []  # (country, tech, spec)
    const_cost = 0.0
    for c in countries:
        for g in sorted(inst.techs):
            spec = inst.techs[g]
            b = inst.bounds.gen(c, g)
            if b.up == 0.0:
                continue
            vc = (
                spec.fuel_cost_eur_per_mwh_fuel
                + inst.co2_price * spec.carbon_content_t_per_mwh_fuel
            ) / spec.efficiency
            if spec.tech_class == "variable_renewable":
                factor = np.asarray(inst.availability[(c, g)], dtype=float)
            else:
                factor = np.full(H, spec.availability)
            if b.low == b.up:
                const_cost += pror * spec.fixed_cost_keur_per_mw_yr * 1e3 * b.low
                units.append((vc, c, g, b.low, factor, None))
            else:
                assert b.low == 0.0 and b.up == INF, "oracle expects [0, inf) free caps"
                free_index = len(free_specs)
                free_specs.append((c, g, spec))
                units.append((vc, c, g, None, factor, free_index))
    assert len(free_specs) <= 2, "oracle handles at most two free capacities"
    units.sort(key=lambda u: (u[0], u[1], u[2]))

    peak = max(float(eff_load[c].max()) for c in countries)
    step = step_frac * peak
    axis = np.arange(0.0, top_frac * peak + step, step)
    if len(free_specs) == 0:
        grids = [np.zeros(1)]
        caps = []
    elif len(free_specs) == 1:
        caps = [axis]
    else:
        g0, g1 = np.meshgrid(axis, axis, indexing="ij")
        caps = [g0.ravel(), g1.ravel()]
    P = len(caps[0]) if caps else 1

    cost = np.full(P, const_cost)
    for k, (c, g, spec) in enumerate(free_specs):
        per_mw_yr = (
            _annuity(spec.overnight_cost_keur_per_mw, spec.interest_rate, spec.lifetime_yr)
            + spec.fixed_cost_keur_per_mw_yr
        ) * 1e3  # EUR/MW/yr
        cost = cost + pror * per_mw_yr * caps[k]

    ntc0 = {}
    for a in countries:
        for b2 in countries:
            if a != b2:
                ntc0[(a, b2)] = inst.ntc.get(a, b2)

    feas_tol = 1e-6 * max(1.0, peak)
    infeasible = np.zeros(P, dtype=bool)
    for h in range(H):
        rem = {c: np.full(P, eff_load[c][h]) for c in countries}
        ntc_rem = {key: np.full(P, mw) for key, mw in ntc0.items()}
        for vc, c, g, cap_mw, factor, free_index in units:
            cap = caps[free_index] if free_index is not None else cap_mw
            avail = cap * factor[h]
            own = np.minimum(rem[c], avail)
            rem[c] = rem[c] - own
            spare = avail - own
            cost = cost + vc * own
            for c2 in countries:
                if c2 == c or (c, c2) not in ntc_rem:
                    continue
                exported = np.minimum(np.minimum(spare, ntc_rem[(c, c2)]), rem[c2])
                rem[c2] = rem[c2] - exported
                ntc_rem[(c, c2)] = ntc_rem[(c, c2)] - exported
                spare = spare - exported
                cost = cost + vc * exported
        for c in countries:
            infeasible |= rem[c] > feas_tol
    cost[infeasible] = INF
    best = float(cost.min())
    assert np.isfinite(best), "oracle grid found no feasible capacity point"
    return best
