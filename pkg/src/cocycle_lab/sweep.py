"""Parameter sweeps over (a1, a2, E, eps) grids.

Config files are flat ``key = value`` text with ``#`` comments. Lists are
comma separated, ranges are ``min:max:count``. ``E = auto:COUNT`` spans
+-(2|a1| + 2|a2| + 2.5) for each (a1, a2), which contains the spectrum, and
``a2_over_a1`` may replace ``a2`` to tie a2 to a1.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import tempfile
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .cocycle import GOLDEN_MEAN, ModelParams
from .engine import le_estimate, le_profile, spectrum_membership
from .oracles import rng
from .tolerances import DEFAULT_N, DEFAULT_PHASES, Tolerances

MAX_CELLS = 10**7

CELL_COLUMNS = (
    "a1", "a2", "E", "eps", "le", "stdError", "n", "phases",
    "hermanBound", "theoremBound", "hermanMargin", "theoremMargin",
    "theoremApplicable", "boundsSatisfied", "regime", "membership",
)


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def parse_values(text: str, key: str = "value") -> list[float]:
    """``1, 2, 3`` or ``min:max:count``."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            count = int(count)
            if count < 1:
                raise ConfigError(key, "range count must be >= 1")
            return [float(v) for v in np.linspace(float(lo), float(hi), count)]
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {text!r} ({exc})") from None
    if not vals:
        raise ConfigError(key, "empty list")
    return vals


def _bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {text!r}")


@dataclass
class SweepPlan:
    a1_values: list
    a2_values: list | None = None
    a2_over_a1: list | None = None
    E_values: list | None = None
    E_auto_count: int | None = None
    eps_values: list = field(default_factory=lambda: [0.0])
    alpha: float = GOLDEN_MEAN
    n: int = DEFAULT_N
    phases: int = DEFAULT_PHASES
    seed: int = 0
    phase_offset: float | None = None
    profile: bool = False
    eps_max: float | None = None
    eps_steps: int = 24
    tolerances: Tolerances = field(default_factory=Tolerances)

    def validate(self) -> None:
        if not self.a1_values:
            raise ConfigError("a1", "required")
        if (self.a2_values is None) == (self.a2_over_a1 is None):
            raise ConfigError("a2", "give exactly one of a2 and a2_over_a1")
        if (self.E_values is None) == (self.E_auto_count is None):
            raise ConfigError("E", "required (list, range or auto:COUNT)")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha", "must lie in (0, 1)")
        if self.n < 1000:
            raise ConfigError("n", "must be >= 1000")
        if self.n < 10_000:
            warnings.warn(f"n = {self.n} < 10^4: finite-volume bias may exceed tolerances")
        if self.phases < 1:
            raise ConfigError("phases", "must be >= 1")
        if self.cell_count() > MAX_CELLS:
            raise ConfigError("E", f"{self.cell_count()} cells exceed the limit {MAX_CELLS}")

    def cell_count(self) -> int:
        n_a2 = len(self.a2_values if self.a2_values is not None else self.a2_over_a1 or [])
        n_E = len(self.E_values) if self.E_values is not None else (self.E_auto_count or 0)
        return len(self.a1_values) * n_a2 * n_E * len(self.eps_values)

    def offset(self) -> float:
        if self.phase_offset is not None:
            return self.phase_offset
        return 0.0 if self.seed == 0 else float(rng(self.seed).random()) / self.phases

    def cells(self):
        for a1 in self.a1_values:
            if self.a2_values is not None:
                a2s = self.a2_values
            else:
                a2s = [a1 * r for r in self.a2_over_a1]
            for a2 in a2s:
                if self.E_values is not None:
                    Es = self.E_values
                else:
                    span = 2.0 * abs(a1) + 2.0 * abs(a2) + 2.5
                    Es = [float(e) for e in np.linspace(-span, span, self.E_auto_count)]
                for E, eps in itertools.product(Es, self.eps_values):
                    yield ModelParams(a1, a2, E, self.alpha), eps


def parse_config(text: str) -> SweepPlan:
    raw: dict[str, str] = {}
    tol: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {line!r}")
        if key.startswith("tolerance."):
            tol[key.split(".", 1)[1]] = value
        else:
            raw[key] = value.strip()

    known = {"a1", "a2", "a2_over_a1", "E", "eps", "alpha", "n", "phases", "seed",
             "phase_offset", "profile", "eps_max", "eps_steps"}
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown key")

    def num(key, cast, default):
        if key not in raw:
            return default
        try:
            return cast(float(raw[key])) if cast is int else cast(raw[key])
        except ValueError:
            raise ConfigError(key, f"cannot parse {raw[key]!r}") from None

    plan = SweepPlan(a1_values=parse_values(raw["a1"], "a1") if "a1" in raw else [])
    if "a2" in raw:
        plan.a2_values = parse_values(raw["a2"], "a2")
    if "a2_over_a1" in raw:
        plan.a2_over_a1 = parse_values(raw["a2_over_a1"], "a2_over_a1")
    if "E" in raw:
        if raw["E"].startswith("auto"):
            _, _, count = raw["E"].partition(":")
            try:
                plan.E_auto_count = int(count)
            except ValueError:
                raise ConfigError("E", f"expected auto:COUNT, got {raw['E']!r}") from None
        else:
            plan.E_values = parse_values(raw["E"], "E")
    if "eps" in raw:
        plan.eps_values = parse_values(raw["eps"], "eps")
    plan.alpha = num("alpha", float, GOLDEN_MEAN)
    plan.n = num("n", int, DEFAULT_N)
    plan.phases = num("phases", int, DEFAULT_PHASES)
    plan.seed = num("seed", int, 0)
    plan.phase_offset = num("phase_offset", float, None)
    plan.eps_max = num("eps_max", float, None)
    plan.eps_steps = num("eps_steps", int, 24)
    if "profile" in raw:
        plan.profile = _bool(raw["profile"], "profile")
    try:
        plan.tolerances = Tolerances().override(**tol)
    except (KeyError, ValueError) as exc:
        raise ConfigError("tolerance", str(exc)) from None
    plan.validate()
    return plan


def load_config(path: str) -> SweepPlan:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("config", str(exc)) from None
    return parse_config(text)


@dataclass
class SweepResult:
    records: list
    summary: dict

    def cells_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CELL_COLUMNS)
        for rec in self.records:
            w.writerow(["" if rec[c] is None else _fmt(rec[c]) for c in CELL_COLUMNS])
        return buf.getvalue()

    def summary_json(self) -> str:
        # wall time stays out of the file so reruns are byte-identical
        body = {k: v for k, v in self.summary.items() if k != "wallTime"}
        return json.dumps(body, indent=2, sort_keys=True) + "\n"

    @property
    def theorem_violations(self) -> int:
        return self.summary["theorem"]["violations"]

    def write(self, out_dir: str) -> None:
        """Write cells.csv and summary.json; nothing lands on failure."""
        os.makedirs(out_dir, exist_ok=True)
        staged = []
        try:
            for name, text in (("cells.csv", self.cells_csv()), ("summary.json", self.summary_json())):
                fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out_dir)
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
                staged.append((tmp, os.path.join(out_dir, name)))
        except BaseException:
            for tmp, _ in staged:
                os.unlink(tmp)
            raise
        for tmp, final in staged:
            os.replace(tmp, final)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def evaluate_cell(p: ModelParams, eps: float, plan: SweepPlan, offset: float) -> dict:
    tol = plan.tolerances
    est = le_estimate(p, eps, plan.n, plan.phases, offset)
    rec = {"a1": p.a1, "a2": p.a2, "E": p.E, "eps": eps, "le": est.value,
           "stdError": est.std_error, "n": est.n, "phases": est.phases,
           "hermanBound": None, "theoremBound": None, "hermanMargin": None,
           "theoremMargin": None, "theoremApplicable": False, "boundsSatisfied": None,
           "regime": None, "membership": None}
    if eps == 0.0:
        rep = bounds.bound_report(p, est)
        rec["hermanBound"] = rep.herman_bound
        rec["theoremBound"] = rep.theorem_bound
        rec["hermanMargin"] = rep.margins.get("herman")
        rec["theoremMargin"] = rep.margins.get("theorem")
        rec["theoremApplicable"] = rep.theorem_bound is not None
        rec["boundsSatisfied"] = rep.satisfied(tol.sigmas, tol.bound)
        if plan.profile:
            prof = le_profile(p, plan.eps_max, plan.eps_steps, plan.n, plan.phases, offset, tol)
            rec["regime"] = prof.regime.value
            rec["membership"] = spectrum_membership(prof, tol).value
    return rec


def run_sweep(plan: SweepPlan) -> SweepResult:
    plan.validate()
    start = time.perf_counter()
    offset = plan.offset()
    records = [evaluate_cell(p, eps, plan, offset) for p, eps in plan.cells()]
    tol = plan.tolerances

    def tally(kind: str) -> dict:
        bkey, mkey = f"{kind}Bound", f"{kind}Margin"
        rows = [r for r in records if r[bkey] is not None and r[mkey] is not None]
        slack = [r[mkey] + tol.sigmas * r["stdError"] + tol.bound for r in rows]
        worst = min(rows, key=lambda r: r[mkey], default=None)
        return {
            "applicable": len(rows),
            "passed": sum(s >= 0.0 for s in slack),
            "violations": sum(s < 0.0 for s in slack),
            "worstMargin": None if worst is None else worst[mkey],
            "worstCell": None if worst is None else {k: worst[k] for k in ("a1", "a2", "E")},
        }

    summary = {
        "cells": len(records),
        "alpha": plan.alpha,
        "n": plan.n,
        "phases": plan.phases,
        "seed": plan.seed,
        "phaseOffset": offset,
        "tolerances": {"sigmas": tol.sigmas, "bound": tol.bound},
        "herman": tally("herman"),
        "theorem": tally("theorem"),
        "wallTime": time.perf_counter() - start,
    }
    if plan.profile:
        regimes: dict[str, int] = {}
        for r in records:
            if r["regime"] is not None:
                regimes[r["regime"]] = regimes.get(r["regime"], 0) + 1
        summary["regimes"] = dict(sorted(regimes.items()))
    return SweepResult(records, summary)
