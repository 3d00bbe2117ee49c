"""Identity and inequality suites run by ``fracns verify``.

Each check yields a dict ``{"name", "passed", ...measured values}``.  A suite
passes iff every check passes.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .commutator import commutator_ensemble, lemma21_report
from .decay import comparison_ode, osgood_bound
from .fracops import gagliardo_nirenberg_ratio, interpolation_ratio, lp_energy_ratio
from .grid import BoxSpec, fft3, random_field
from .turbulence import MultifractalParams, legendre_zeta, zeta_p

# Empirical constants frozen from the reference ensembles (seed 0, n = 32,
# spectral envelope exp(-0.2 |k|^2), s = 0.75, default sigma).
LEMMA31_RMAX = 0.0566719309529855
GN_RMAX_Q6 = 0.1249553806870695

S_GRID = (0.6, 0.75, 0.9)
DELTA_GRID = (0.01, 0.1, 0.5)
P_GRID = tuple(np.arange(0.0, 8.0 + 1e-12, 0.5))


def _check(name: str, passed: bool, **values) -> dict:
    return {"name": name, "passed": bool(passed), **values}


def multifractal_checks() -> list[dict]:
    out = []
    worst_z3 = 0.0
    for s in S_GRID:
        for d in DELTA_GRID:
            worst_z3 = max(worst_z3, abs(zeta_p(3.0, MultifractalParams(s, d)) - 1.0))
    out.append(_check("zeta3_equals_1", worst_z3 <= 1e-12, max_abs_error=worst_z3, tolerance=1e-12))
    worst = 0.0
    worst_at = None
    for s in S_GRID:
        for d in DELTA_GRID:
            mp = MultifractalParams(s, d)
            for p in P_GRID:
                err = abs(legendre_zeta(float(p), mp) - zeta_p(float(p), mp))
                if err > worst:
                    worst, worst_at = err, {"p": float(p), "s": s, "delta": d}
    out.append(
        _check("legendre_matches_closed_form", worst <= 1e-6, max_abs_error=worst, tolerance=1e-6, worst_at=worst_at)
    )
    return out


def commutator_checks(seed: int = 12345, count: int = 100, n: int = 32) -> list[dict]:
    reports = commutator_ensemble(BoxSpec(n), count, seed)
    ratios = np.array([r.ratio for r in reports])
    rmax = float(ratios.max())
    out = [
        _check(
            "lemma31_ratio_stable",
            bool(np.all(np.isfinite(ratios))) and rmax < 2 * LEMMA31_RMAX,
            max_ratio=rmax,
            pinned_rmax=LEMMA31_RMAX,
            limit=2 * LEMMA31_RMAX,
            seed=seed,
            count=count,
        )
    ]
    box = BoxSpec(n)
    x1 = box.mesh()[0]

    f = fft3(np.sin(x1))
    rep = lemma21_report(f, f, 0.75, box)
    out.append(_check("lemma21_ratio_finite", math.isfinite(rep.ratio), lhs=rep.lhs, rhs=rep.rhs, ratio=rep.ratio))
    return out


def interpolation_checks(seed: int = 0, count: int = 100, n: int = 32) -> list[dict]:
    box = BoxSpec(n)
    rng = np.random.default_rng(seed)
    interp = []
    gn = []
    lp = []
    for _ in range(count):
        u = random_field(box, rng)
        interp.append(interpolation_ratio(u, 0.75, 0.25, 1.5))
        gn.append(gagliardo_nirenberg_ratio(u, 0.75, 6.0))
        lp.append(lp_energy_ratio(u))
    imax, gmax = float(max(interp)), float(max(gn))
    return [
        _check("interpolation_constant_le_1", imax <= 1 + 1e-10, max_ratio=imax, tolerance=1e-10),
        _check("gagliardo_nirenberg_bounded", gmax < 1e3, max_ratio=gmax, pinned=GN_RMAX_Q6),
        _check("lp_energy_equivalence", 0.3 <= min(lp) and max(lp) <= 3, min_ratio=min(lp), max_ratio=max(lp)),
    ]


def osgood_checks() -> list[dict]:
    out = []
    worst = 0.0
    for rho0, gi in [(1.0, 1.0), (0.5, 0.3), (2.0, 2.0), (10.0, 0.5)]:
        bound = osgood_bound(rho0, gi)
        sol = solve_ivp(
            lambda t, r: r * np.log(np.e + r), (0.0, gi), [rho0], method="DOP853", rtol=1e-12, atol=1e-14
        )
        err = abs(bound - sol.y[0, -1]) / sol.y[0, -1]
        worst = max(worst, err)
    out.append(_check("osgood_matches_ode", worst <= 1e-6, max_rel_error=worst, tolerance=1e-6))
    worst = 0.0
    mu, c, y0 = 0.5, 2.0, 0.25
    for t in np.linspace(0.05, 1.5, 30):
        h = 1e-5
        dz = (comparison_ode(y0, mu, c, t + h) - comparison_ode(y0, mu, c, t - h)) / (2 * h)
        rhs = c * comparison_ode(y0, mu, c, t) ** (1 + mu)
        worst = max(worst, abs(dz - rhs) / rhs)
    out.append(_check("comparison_ode_satisfies_ode", worst < 1e-6, max_rel_error=worst, tolerance=1e-6))
    return out


SUITES: dict[str, Callable[[], list[dict]]] = {
    "multifractal": multifractal_checks,
    "commutator": commutator_checks,
    "interpolation": interpolation_checks,
    "osgood": osgood_checks,
}


def run_suite(name: str) -> list[dict]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn()]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
