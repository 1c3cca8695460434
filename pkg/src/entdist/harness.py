"""Scenario presets, flat-config loading and plot-ready result emission.

A scenario is a named list of sweep points (scheme configs over L and p_m)
plus Monte Carlo controls. The built-in presets reproduce the standard
figure parameter sets:

* fig2a / fig2b / fig2c: MM with trapped-ion / NV / quantum-dot memories,
  N = 3, rates swept over L = 5..50 km and p_m in {0.02, 0.5, 1}.
* fig5a / fig5b: AFC-MM / AFC-MS with the realistic comb (100 modes,
  p_AFC = 0.53, p_pass = 0.9, 10 ns trial clock).
* fig5c / fig5d: the same with a single mode (N_AFC = 1), plus a quantum-dot
  N = 1 baseline series (MM baseline for fig5c, MS for fig5d).
* fig6a / fig6b: the optimistic comb (1060 modes, p_AFC = 1).

Configs are flat JSON documents; every key is optional on top of a named
preset base. The schema is documented in the README.
"""

from __future__ import annotations

import copy
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .analytic import (
    SchemeConfig,
    SchemeKind,
    analytic_rate,
    feasibility_check,
    round_time,
    trials_per_round,
)
from .montecarlo import DEFAULT_SEED, GRANULARITIES, McControls, estimate_rate, subseed
from .params import (
    AFC_REALISTIC,
    AfcSpec,
    DEFAULT_C_KM_PER_S,
    DEFAULT_DETECTOR_EFFICIENCY,
    DEFAULT_FIBER_INDEX,
    DEFAULT_L_ATT_KM,
    LinkParams,
    MEMORY_PRESETS,
    MemorySpec,
)

__all__ = [
    "ConfigError",
    "Scenario",
    "ResultRow",
    "CSV_HEADER",
    "PRESETS",
    "preset_names",
    "build_scenario",
    "run_scenario",
    "rows_to_csv",
    "rows_to_json",
    "emit",
]


class ConfigError(ValueError):
    """A preset name, config document or override could not be used."""


PRESET_L_KM = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0]
PRESET_P_M = [0.02, 0.5, 1.0]

CSV_HEADER = "scheme,L_km,p_m,analytic_rate,mc_rate,mc_stderr,K,t_round_s,feasible,seed"

# Keys a series (one scheme swept over L and p_m) understands.
_SERIES_KEYS = {
    "scheme",
    "L_km",
    "p_m",
    "L_att_km",
    "n",
    "c_km_per_s",
    "p_d",
    "ms_sync_factor",
    "N_A",
    "N_B",
    "memory.kind",
    "memory.label",
    "memory.t_clock_s",
    "memory.emission_fraction",
    "memory.collection_efficiency",
    "memory.N",
    "afc.N_AFC",
    "afc.t_rephase_s",
    "afc.t_spin_coherence_s",
    "afc.p_AFC",
    "afc.p_pass",
    "afc.t_clock_prime_s",
}
_SCENARIO_KEYS = {"mc.n_rounds", "mc.seed", "mc.trial_granularity"}


def _afc_series(scheme: str, n_afc: int, p_afc: float) -> dict[str, Any]:
    return {
        "scheme": scheme,
        "L_km": PRESET_L_KM,
        "p_m": PRESET_P_M,
        "afc.N_AFC": n_afc,
        "afc.t_rephase_s": 51e-6,
        "afc.t_spin_coherence_s": 1e-3,
        "afc.p_AFC": p_afc,
        "afc.p_pass": 0.9,
        "afc.t_clock_prime_s": 10e-9,
    }


def _spin_series(scheme: str, kind: str, n: int) -> dict[str, Any]:
    return {
        "scheme": scheme,
        "L_km": PRESET_L_KM,
        "p_m": PRESET_P_M,
        "memory.kind": kind,
        "memory.N": n,
    }


PRESETS: dict[str, dict[str, Any]] = {
    "fig2a": {
        "description": "MM, trapped-ion memories, N=3",
        "series": [_spin_series("mm", "trapped-ion", 3)],
        "mc.n_rounds": 100_000,
    },
    "fig2b": {
        "description": "MM, diamond NV memories, N=3",
        "series": [_spin_series("mm", "nv", 3)],
        "mc.n_rounds": 100_000,
    },
    "fig2c": {
        "description": "MM, quantum-dot memories, N=3",
        "series": [_spin_series("mm", "quantum-dot", 3)],
        "mc.n_rounds": 100_000,
    },
    "fig5a": {
        "description": "AFC-MM, realistic comb (100 modes, p_AFC=0.53)",
        "series": [_afc_series("afc-mm", 100, 0.53)],
        "mc.n_rounds": 500_000,
    },
    "fig5b": {
        "description": "AFC-MS, realistic comb (100 modes, p_AFC=0.53)",
        "series": [_afc_series("afc-ms", 100, 0.53)],
        "mc.n_rounds": 500_000,
    },
    "fig5c": {
        "description": "AFC-MM single mode vs quantum-dot MM baseline (N=1)",
        "series": [_afc_series("afc-mm", 1, 0.53), _spin_series("mm", "quantum-dot", 1)],
        "mc.n_rounds": 500_000,
    },
    "fig5d": {
        "description": "AFC-MS single mode vs quantum-dot MS baseline (N=1)",
        "series": [_afc_series("afc-ms", 1, 0.53), _spin_series("ms", "quantum-dot", 1)],
        "mc.n_rounds": 500_000,
    },
    "fig6a": {
        "description": "AFC-MM, optimistic comb (1060 modes, p_AFC=1)",
        "series": [_afc_series("afc-mm", 1060, 1.0)],
        "mc.n_rounds": 500_000,
    },
    "fig6b": {
        "description": "AFC-MS, optimistic comb (1060 modes, p_AFC=1)",
        "series": [_afc_series("afc-ms", 1060, 1.0)],
        "mc.n_rounds": 500_000,
    },
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


@dataclass(frozen=True)
class Scenario:
    name: str
    points: tuple[SchemeConfig, ...]
    mc: McControls
    description: str = ""


@dataclass(frozen=True, slots=True)
class ResultRow:
    """One sweep point, analytic and Monte Carlo side by side.

    mc_rate / mc_stderr are None for analytic-only runs and for infeasible
    AFC points (feasible is False there).
    """

    scheme: str
    L_km: float
    p_m: float
    analytic_rate: float
    mc_rate: float | None
    mc_stderr: float | None
    K: int
    t_round_s: float
    feasible: bool
    seed: int


def _as_number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(value)


def _as_number_list(key: str, value: Any) -> list[float]:
    if isinstance(value, (list, tuple)):
        if not value:
            raise ConfigError(f"{key} must not be an empty list")
        return [_as_number(key, v) for v in value]
    return [_as_number(key, value)]


def _build_memory(series: Mapping[str, Any], scheme: SchemeKind) -> MemorySpec | AfcSpec:
    if scheme.is_afc:
        base = AFC_REALISTIC
        return AfcSpec(
            N_AFC=_as_int("afc.N_AFC", series.get("afc.N_AFC", base.N_AFC)),
            t_rephase=_as_number("afc.t_rephase_s", series.get("afc.t_rephase_s", base.t_rephase)),
            t_spin_coherence=_as_number(
                "afc.t_spin_coherence_s", series.get("afc.t_spin_coherence_s", base.t_spin_coherence)
            ),
            p_AFC=_as_number("afc.p_AFC", series.get("afc.p_AFC", base.p_AFC)),
            p_pass=_as_number("afc.p_pass", series.get("afc.p_pass", base.p_pass)),
            t_clock_prime=_as_number(
                "afc.t_clock_prime_s", series.get("afc.t_clock_prime_s", base.t_clock_prime)
            ),
        )
    kind = series.get("memory.kind", "quantum-dot")
    if kind not in MEMORY_PRESETS:
        raise ConfigError(
            f"memory.kind must be one of {sorted(MEMORY_PRESETS)}, got {kind!r}"
        )
    base = MEMORY_PRESETS[kind]
    return MemorySpec(
        label=str(series.get("memory.label", base.label)),
        t_clock=_as_number("memory.t_clock_s", series.get("memory.t_clock_s", base.t_clock)),
        emission_fraction=_as_number(
            "memory.emission_fraction", series.get("memory.emission_fraction", base.emission_fraction)
        ),
        collection_efficiency=_as_number(
            "memory.collection_efficiency",
            series.get("memory.collection_efficiency", base.collection_efficiency),
        ),
        N=_as_int("memory.N", series.get("memory.N", base.N)),
    )


def _resolve_series(series: Mapping[str, Any]) -> list[SchemeConfig]:
    unknown = set(series) - _SERIES_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "scheme" not in series:
        raise ConfigError("scheme is required (one of mm, sr, ms, afc-mm, afc-ms)")
    try:
        scheme = SchemeKind(str(series["scheme"]).lower())
    except ValueError:
        raise ConfigError(
            f"scheme must be one of {[k.value for k in SchemeKind]}, got {series['scheme']!r}"
        ) from None
    if "L_km" not in series:
        raise ConfigError("L_km is required (a distance in km, or a list of them)")
    L_values = _as_number_list("L_km", series["L_km"])
    p_m_values = _as_number_list("p_m", series.get("p_m", 1.0))
    memory = _build_memory(series, scheme)
    extra: dict[str, Any] = {}
    if scheme is SchemeKind.SR:
        if "N_A" not in series or "N_B" not in series:
            raise ConfigError("N_A and N_B are required for SR")
        extra["N_A"] = _as_int("N_A", series["N_A"])
        extra["N_B"] = _as_int("N_B", series["N_B"])
    elif "N_A" in series or "N_B" in series:
        raise ConfigError("N_A / N_B are only meaningful for SR")
    if "ms_sync_factor" in series:
        extra["ms_sync_factor"] = _as_int("ms_sync_factor", series["ms_sync_factor"])
    points = []
    for L in L_values:
        link = LinkParams(
            L=L,
            L_att=_as_number("L_att_km", series.get("L_att_km", DEFAULT_L_ATT_KM)),
            n=_as_number("n", series.get("n", DEFAULT_FIBER_INDEX)),
            c=_as_number("c_km_per_s", series.get("c_km_per_s", DEFAULT_C_KM_PER_S)),
            p_d=_as_number("p_d", series.get("p_d", DEFAULT_DETECTOR_EFFICIENCY)),
        )
        for p_m in p_m_values:
            points.append(SchemeConfig(kind=scheme, link=link, memory=memory, p_m=p_m, **extra))
    return points


def _apply_overrides(scenario: dict[str, Any], overrides: Mapping[str, Any]) -> None:
    for key, value in overrides.items():
        if key in _SCENARIO_KEYS:
            scenario[key] = value
        elif key in _SERIES_KEYS:
            for series in scenario["series"]:
                series[key] = value
        else:
            known = sorted(_SERIES_KEYS | _SCENARIO_KEYS)
            raise ConfigError(f"unknown config key {key!r}; known keys: {known}")


def _load_config_file(path: str) -> dict[str, Any]:
    try:
        document = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path!r}: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"config file {path!r} must contain a JSON object")
    return document


def build_scenario(
    source: str,
    overrides: Mapping[str, Any] | None = None,
    seed: int | None = None,
    rounds: int | None = None,
) -> Scenario:
    """Resolve a preset name or config-file path into a runnable scenario.

    Points are ordered by (scheme, L, p_m); Monte Carlo sub-seeds are keyed to
    that order, so an identical scenario always reproduces identical rows.
    """
    document: dict[str, Any] = {}
    if source in PRESETS:
        scenario = copy.deepcopy(PRESETS[source])
        name = source
    elif source == "custom" or source.endswith(".json") or Path(source).exists():
        if source != "custom":
            document = _load_config_file(source)
        base = document.pop("preset", None)
        if base is not None:
            if base not in PRESETS:
                raise ConfigError(f"unknown preset {base!r}; available: {preset_names()}")
            scenario = copy.deepcopy(PRESETS[base])
        else:
            scenario = {"description": "custom scenario", "series": [{}]}
        name = Path(source).stem if source != "custom" else "custom"
        _apply_overrides(scenario, document)
    else:
        raise ConfigError(f"unknown preset or config path {source!r}; presets: {preset_names()}")
    if overrides:
        _apply_overrides(scenario, dict(overrides))
    if rounds is not None:
        scenario["mc.n_rounds"] = rounds
    if seed is not None:
        scenario["mc.seed"] = seed
    granularity = scenario.get("mc.trial_granularity", "binomial")
    if granularity not in GRANULARITIES:
        raise ConfigError(f"mc.trial_granularity must be one of {GRANULARITIES}, got {granularity!r}")
    mc = McControls(
        n_rounds=_as_int("mc.n_rounds", scenario.get("mc.n_rounds", 100_000)),
        seed=_as_int("mc.seed", scenario.get("mc.seed", DEFAULT_SEED)),
        trial_granularity=granularity,
    )
    points: list[SchemeConfig] = []
    for series in scenario["series"]:
        points.extend(_resolve_series(series))
    points.sort(key=lambda cfg: (cfg.kind.value, cfg.link.L, cfg.p_m))
    return Scenario(
        name=name,
        points=tuple(points),
        mc=mc,
        description=str(scenario.get("description", "")),
    )


def run_scenario(
    source: str,
    overrides: Mapping[str, Any] | None = None,
    seed: int | None = None,
    rounds: int | None = None,
    with_mc: bool = True,
) -> list[ResultRow]:
    """Run a scenario and return one row per sweep point.

    Each point gets the analytic closed form and, unless with_mc is False, a
    Monte Carlo estimate on its own deterministic sub-seed stream. Infeasible
    AFC points are flagged (feasible=False) with empty Monte Carlo fields
    rather than aborting the sweep.
    """
    scenario = build_scenario(source, overrides=overrides, seed=seed, rounds=rounds)
    rows: list[ResultRow] = []
    for index, cfg in enumerate(scenario.points):
        point_seed = subseed(scenario.mc.seed, index)
        feasible = feasibility_check(cfg).ok if cfg.kind.is_afc else True
        mc_rate = mc_stderr = None
        if with_mc and feasible:
            estimate = estimate_rate(cfg, replace(scenario.mc, seed=point_seed))
            mc_rate, mc_stderr = estimate.rate, estimate.stderr
        rows.append(
            ResultRow(
                scheme=cfg.kind.value,
                L_km=cfg.link.L,
                p_m=cfg.p_m,
                analytic_rate=analytic_rate(cfg),
                mc_rate=mc_rate,
                mc_stderr=mc_stderr,
                K=trials_per_round(cfg),
                t_round_s=round_time(cfg),
                feasible=feasible,
                seed=point_seed,
            )
        )
    return rows


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    """Fixed-header CSV with LF endings and shortest round-trip floats."""
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in (
            row.scheme, row.L_km, row.p_m, row.analytic_rate, row.mc_rate,
            row.mc_stderr, row.K, row.t_round_s, row.feasible, row.seed,
        )))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: Sequence[ResultRow]) -> str:
    """JSON array of objects with the same keys as the CSV columns."""
    payload = [
        {
            "scheme": row.scheme,
            "L_km": row.L_km,
            "p_m": row.p_m,
            "analytic_rate": row.analytic_rate,
            "mc_rate": row.mc_rate,
            "mc_stderr": row.mc_stderr,
            "K": row.K,
            "t_round_s": row.t_round_s,
            "feasible": row.feasible,
            "seed": row.seed,
        }
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def emit(rows: Sequence[ResultRow], fmt: str = "csv", destination: str | None = None) -> None:
    """Write rows as csv or json to a path, or to stdout when destination is None."""
    if not rows:
        raise ValueError("emit requires at least one row")
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows)
    else:
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    if destination is None or destination == "-":
        sys.stdout.write(text)
    else:
        with open(destination, "w", newline="") as handle:
            handle.write(text)
