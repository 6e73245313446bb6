"""Entropy estimates for the twist functor: h_cat and bounds on h_pol."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .algebra import GradedAlgebra
from .entropy import ComplexityBound, Credit, Pyramid, delta_bound
from .growth import GrowthError, growth_fit, weight_totals
from .homology import ext_table


@dataclass
class EntropyConfig:
    n_max: int = 500              # bound DP
    n_ext: int | None = None      # Ext window for the lower bound (default 120, 60 above dim 16)
    window: tuple | None = None   # growth-fit window
    pyramids: list | None = None  # explicit pyramids; default: shipped ones for built-ins
    credits: dict = field(default_factory=dict)   # pyramid index -> list of Credit
    fit_tolerance: float = 0.25


@dataclass
class EntropyReport:
    algebra: str
    generator: list
    h_cat: dict | None
    h_pol_lower: dict | None
    h_pol_upper: dict | None
    flags: list
    bounds: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "generator": self.generator,
            "h_cat": self.h_cat,
            "h_pol_lower": self.h_pol_lower,
            "h_pol_upper": self.h_pol_upper,
            "flags": self.flags,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def summary(self) -> str:
        lines = [f"algebra {self.algebra}"]
        if self.h_cat:
            lines.append(f"  h_cat estimate {self.h_cat['slope']:.5f} over {self.h_cat['window']}")
        if self.h_pol_lower:
            lines.append(f"  h_pol >= {self.h_pol_lower['slope']:.3f} (fit, residual "
                         f"{self.h_pol_lower['residual']:.3f}, window {self.h_pol_lower['window']})")
        if self.h_pol_upper:
            u = self.h_pol_upper
            lines.append(f"  h_pol <= {u['value']} ({u['source']} {u['name']}, credits {u['credits']})")
            for c in u.get("candidates", [])[1:]:
                lines.append(f"           {c['value']} ({c['source']} {c['name']})")
        for fl in self.flags:
            lines.append(f"  flag: {fl}")
        return "\n".join(lines)


def _r(x: float) -> float:
    return round(float(x), 6)


def lower_bound(a: GradedAlgebra, n_ext: int, window=None) -> dict:
    """Growth-fit slope of C(n) = Σ_s dim Ext^{s,n}(k, k), n <= n_ext."""
    tab = ext_table(a, n_ext, n_ext, keep_columns=False)
    samples = [(n, weight_totals(tab, n)) for n in range(1, n_ext + 1)]
    fit = growth_fit(samples, window)
    return {"slope": _r(fit.slope), "residual": _r(fit.residual), "window": list(fit.window),
            "points": fit.used, "zeros_excluded": fit.zeros_excluded}


def _upper_entry(py: Pyramid, credits: list, cb: ComplexityBound) -> dict:
    return {
        "value": py.upper_bound(len(credits)),
        "source": py.source,
        "name": py.name,
        "levels": py.dimension,
        "credits": len(credits),
        "B_nmax": cb.values[-1],
        "bound_degree": _r(cb.polynomial_degree()),
        "witness_dependent": True,
    }


def estimate_entropy(a: GradedAlgebra, config: EntropyConfig | None = None) -> EntropyReport:
    cfg = config or EntropyConfig()
    flags: list[str] = []
    d = max(a.top_degree, 1)
    generator = [f"k({i})" for i in range(d)]
    if a.dim == 1:
        flags.append("stable category is zero: B(n) = 0, entropies are 0 by convention")
        return EntropyReport(a.name, [], {"slope": 0.0, "window": [cfg.n_max // 2, cfg.n_max]},
                             None, {"value": 0, "source": "zero category", "name": "", "credits": 0},
                             flags)

    # lower bound
    n_ext = cfg.n_ext if cfg.n_ext is not None else (120 if a.dim <= 16 else 60)
    try:
        lower = lower_bound(a, n_ext, cfg.window)
    except GrowthError as e:
        lower = None
        flags.append(f"lower bound unavailable: {e}")

    # upper bounds
    pyramids = cfg.pyramids
    if pyramids is None:
        from .algebra import BUILTINS
        from .certificates import builtin_pyramids
        pyramids = builtin_pyramids(a.name, a) if a.name in BUILTINS else []
    candidates = []
    bounds = []
    for i, py in enumerate(pyramids):
        credits = list(cfg.credits.get(i, []))
        cb = delta_bound(py, cfg.n_max, {c.level: c for c in credits})
        bounds.append(cb)
        candidates.append((py.upper_bound(len(credits)), i, _upper_entry(py, credits, cb)))
    h_cat = None
    upper = None
    if candidates:
        candidates.sort(key=lambda c: (c[0], c[1]))
        best = bounds[candidates[0][1]]
        slope, window = best.h_cat()
        h_cat = {"slope": _r(slope), "window": list(window),
                 "log_B_over_n": _r(math.log(best.values[-1]) / best.n_max)}
        upper = dict(candidates[0][2])
        upper["candidates"] = [c[2] for c in candidates]
    else:
        flags.append("upper bound unavailable: no tower or pyramid supplied")
    if lower and upper and lower["slope"] > upper["value"] + cfg.fit_tolerance:
        flags.append(f"discrepancy: lower fit {lower['slope']} exceeds certified upper {upper['value']}")
    return EntropyReport(a.name, generator, h_cat, lower, upper, flags, bounds)
