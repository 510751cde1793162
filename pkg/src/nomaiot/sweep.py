"""Parameter sweeps with CSV output.

A sweep spec is a YAML file::

    config:            # config-file keys; omitted keys take the defaults
      M: 2
      Pg_dBm: 0
    variable: tau      # tau, P_g, P_u, P, R, m, N_f or M
    grid: [0.1, 0.5, 1, 2]
    estimators: [exact, monte-carlo]
    tiers: [terrestrial]
    trials: 100000
    seed: 1
    cases:             # optional; each case overrides config keys
      - {name: R500, config: {R_m: 500}}
      - {name: R1000, config: {R_m: 1000}}

Power grid values are in dBm. ``isolated: true`` evaluates each tier as a
network of its own (other tier silent). ``quantity`` selects ``coverage`` (default),
``outage-sum-rate`` or ``throughput`` (finite-blocklength, Monte Carlo only;
``N_f`` and ``sinr_mode`` may be set at top level or per case).

Every cell uses the same seed, so Monte Carlo columns along the grid share
their random numbers and a one-point sweep matches a standalone evaluation.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from . import aerial, montecarlo, terrestrial
from .config import NetworkConfig, config_from_mapping, load_config, parse_power
from .errors import ConfigError, ConvergenceError, NomaError

ESTIMATORS = ("exact", "gauss-chebyshev", "low-rate", "oma", "monte-carlo")
VARIABLES = ("tau", "P_g", "P_u", "P", "R", "m", "N_f", "M")
QUANTITIES = ("coverage", "outage-sum-rate", "throughput")
TIERS = ("terrestrial", "aerial")
COLUMNS = ("case", "value", "estimator", "tier", "device", "conditional", "cumulative",
           "std_error", "rate_bpcu", "status")


@dataclass(frozen=True)
class Case:
    name: str
    overrides: Mapping[str, Any] = field(default_factory=dict)
    N_f: float | None = None
    sinr_mode: str | None = None


@dataclass(frozen=True)
class SweepSpec:
    scenario: NetworkConfig
    variable: str | None
    grid: tuple
    estimators: tuple[str, ...]
    trials: int = 100_000
    seed: int = 0
    output_path: str | None = None
    tiers: tuple[str, ...] = TIERS
    cases: tuple[Case, ...] = (Case("base"),)
    device: int | None = None
    quantity: str = "coverage"
    N_f: float = math.inf
    sinr_mode: str = "threshold"
    quad_order: int = 100
    workers: int = 1
    isolated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "tiers", tuple(self.tiers))
        object.__setattr__(self, "cases", tuple(self.cases))
        if self.variable is not None and self.variable not in VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}; expected one of {VARIABLES}")
        if not self.grid:
            raise ConfigError("grid must be nonempty")
        if self.variable is not None:
            keys = [_sort_key(v) for v in self.grid]
            if keys != sorted(keys):
                raise ConfigError(f"grid must be sorted, got {list(self.grid)}")
        if not self.estimators:
            raise ConfigError("estimators must be nonempty")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad:
            raise ConfigError(f"unknown estimator(s) {bad}; expected a subset of {ESTIMATORS}")
        if "monte-carlo" in self.estimators and self.trials < 1:
            raise ConfigError("trials must be >= 1 when monte-carlo is selected")
        bad = [t for t in self.tiers if t not in TIERS]
        if bad or not self.tiers:
            raise ConfigError(f"tiers must be a nonempty subset of {TIERS}")
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"unknown quantity {self.quantity!r}")
        if self.quantity == "throughput" and self.estimators != ("monte-carlo",):
            raise ConfigError("throughput sweeps support only the monte-carlo estimator")
        if self.sinr_mode not in ("threshold", "instantaneous"):
            raise ConfigError(f"unknown sinr_mode {self.sinr_mode!r}")
        names = [c.name for c in self.cases]
        if not names or len(set(names)) != len(names):
            raise ConfigError("case names must be nonempty and unique")


def _sort_key(v):
    if isinstance(v, str):
        p = parse_power(v)
        return -math.inf if p == 0 else math.log10(p)
    return float(v)


def _number(v):
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", ".inf"):
        return math.inf
    return float(v)


def with_overrides(cfg: NetworkConfig, overrides: Mapping[str, Any]) -> NetworkConfig:
    """Apply config-file keys on top of a resolved config."""
    if not overrides:
        return cfg
    if "M" in overrides:
        cfg = cfg.with_devices(int(overrides["M"]))
    values: dict[str, Any] = dict(cfg.to_mapping())
    values.update({k: _yaml_text(v) for k, v in overrides.items()})
    return config_from_mapping(values)


def _yaml_text(v):
    if isinstance(v, (list, tuple)):
        return ", ".join(str(x) for x in v)
    return str(v)


def apply_variable(cfg: NetworkConfig, variable: str | None, value, device: int | None = None):
    """Return (config, N_f override or None) for one grid value."""
    if variable is None:
        return cfg, None
    if variable == "tau":
        return cfg.with_tau(float(value)), None
    if variable == "P_g":
        return cfg.replace(P_g=parse_power(value)), None
    if variable == "P_u":
        return cfg.replace(P_u=parse_power(value)), None
    if variable == "P":
        p = parse_power(value)
        return cfg.replace(P_g=p, P_u=p), None
    if variable == "R":
        return cfg.replace(R=float(value)), None
    if variable == "m":
        v = int(value)
        if device is None:
            m = (v,) * cfg.M
        else:
            if not 1 <= device <= cfg.M:
                raise ConfigError(f"device {device} outside 1..{cfg.M}")
            m = tuple(v if k == device - 1 else mm for k, mm in enumerate(cfg.m))
        return cfg.replace(m=m), None
    if variable == "M":
        return cfg.with_devices(int(value)), None
    if variable == "N_f":
        return cfg, _number(value)
    raise ConfigError(f"unknown sweep variable {variable!r}")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _row(case, value, estimator, tier, device, conditional=None, cumulative=None,
         std_error=None, rate=None, status="ok"):
    return {"case": case, "value": value, "estimator": estimator, "tier": tier,
            "device": device, "conditional": conditional, "cumulative": cumulative,
            "std_error": std_error, "rate_bpcu": rate, "status": status}


def _tier_power(cfg: NetworkConfig, tier: str) -> float:
    return cfg.P_g if tier == "terrestrial" else cfg.P_u


def _analytic_values(cfg: NetworkConfig, tier: str, estimator: str, N: int):
    """Per-device (value, status) pairs; failures stay local to the device."""
    out = []
    for i in range(1, cfg.M + 1):
        try:
            if tier == "terrestrial":
                fn = {"exact": lambda: terrestrial.coverage_exact(i, cfg),
                      "gauss-chebyshev": lambda: terrestrial.coverage_gc(i, cfg, N),
                      "low-rate": lambda: terrestrial.coverage_low_rate(i, cfg),
                      "oma": lambda: terrestrial.coverage_oma(i, cfg)}[estimator]
            else:
                if estimator == "exact":
                    fn = lambda: aerial.coverage_aerial(i, cfg)  # noqa: E731
                elif estimator == "gauss-chebyshev" and i == 1:
                    fn = lambda: aerial.coverage_aerial_nearest_closed(cfg, N=N)  # noqa: E731
                else:
                    raise NomaError(f"no {estimator} form for aerial device {i}")
            out.append((float(fn()), "ok"))
        except ConvergenceError:
            raise
        except NomaError as exc:
            out.append((None, f"error: {exc}"))
    return out


def _cumulative(vals, oma: bool):
    cum, acc = [], 1.0
    for v, status in vals:
        if v is None or acc is None:
            acc = None
        else:
            acc = v if oma else acc * v
        cum.append(acc)
    return cum


def isolate(cfg: NetworkConfig, tier: str) -> NetworkConfig:
    """The same network with the other tier switched off."""
    return cfg.replace(P_u=0.0) if tier == "terrestrial" else cfg.replace(P_g=0.0)


def evaluate_cell(cfg: NetworkConfig, estimator: str, tiers, trials: int, seed: int,
                  quantity: str = "coverage", N_f: float = math.inf,
                  sinr_mode: str = "threshold", N: int = 100, workers: int = 1,
                  case: str = "base", value=None, isolated: bool = False) -> list[dict]:
    """Rows for one (config, estimator) cell, all tiers.

    With ``isolated`` each tier is evaluated as its own network, i.e. with
    the other tier's transmit power set to zero.
    """
    if isolated:
        rows = []
        for tier in tiers:
            rows.extend(evaluate_cell(isolate(cfg, tier), estimator, (tier,), trials, seed,
                                      quantity, N_f, sinr_mode, N, workers, case, value))
        return rows
    rows = []
    if estimator == "monte-carlo":
        if quantity == "throughput":
            for tier in tiers:
                try:
                    rep = montecarlo.network_throughput(cfg, N_f, trials, seed, tier=tier,
                                                        sinr_mode=sinr_mode, workers=workers)
                except NomaError as exc:
                    rows.append(_row(case, value, estimator, tier, "sum", status=f"error: {exc}"))
                    continue
                for i, r in enumerate(rep.per_device_rate, 1):
                    rows.append(_row(case, value, estimator, tier, i, rate=r))
                rows.append(_row(case, value, estimator, tier, "sum", rate=rep.sum_rate))
            return rows
        reps = montecarlo.run_coverage_sim(cfg, trials, seed, workers)
        for tier in tiers:
            rep = reps[tier]
            for i in range(cfg.M):
                rate = rep.cumulative[i] * cfg.rates_bpcu[i] if quantity == "outage-sum-rate" else None
                rows.append(_row(case, value, estimator, tier, i + 1, rep.per_device[i],
                                 rep.cumulative[i], rep.std_error[i], rate))
            if quantity == "outage-sum-rate":
                total = math.fsum(c * r for c, r in zip(rep.cumulative, cfg.rates_bpcu))
                rows.append(_row(case, value, estimator, tier, "sum", rate=total))
        return rows

    if quantity == "throughput":
        raise ConfigError("throughput needs the monte-carlo estimator")
    for tier in tiers:
        if estimator in ("low-rate", "oma") and tier == "aerial":
            rows.append(_row(case, value, estimator, tier, "", status=f"error: {estimator} is terrestrial only"))
            continue
        if _tier_power(cfg, tier) <= 0:
            rows.append(_row(case, value, estimator, tier, "", status="error: tier transmit power is zero"))
            continue
        vals = _analytic_values(cfg, tier, estimator, N)
        cum = _cumulative(vals, estimator == "oma")
        for i, ((v, status), c) in enumerate(zip(vals, cum), 1):
            rate = c * cfg.rates_bpcu[i - 1] if quantity == "outage-sum-rate" and c is not None else None
            rows.append(_row(case, value, estimator, tier, i, v, c, None, rate, status))
        if quantity == "outage-sum-rate":
            ok = all(c is not None for c in cum)
            total = math.fsum(c * r for c, r in zip(cum, cfg.rates_bpcu)) if ok else None
            rows.append(_row(case, value, estimator, tier, "sum", rate=total,
                             status="ok" if ok else "error: incomplete device set"))
    return rows


def _cells(spec: SweepSpec):
    for case in spec.cases:
        base = with_overrides(spec.scenario, case.overrides)
        for value in spec.grid:
            cfg, nf = apply_variable(base, spec.variable, value, spec.device)
            if nf is None:
                nf = case.N_f if case.N_f is not None else spec.N_f
            for est in spec.estimators:
                yield dict(cfg=cfg, estimator=est, tiers=spec.tiers, trials=spec.trials,
                           seed=spec.seed, quantity=spec.quantity, N_f=nf,
                           sinr_mode=case.sinr_mode or spec.sinr_mode, N=spec.quad_order,
                           workers=1,
                           case=case.name, value=value, isolated=spec.isolated)


def _timed(kw):
    t0 = time.perf_counter()
    rows = evaluate_cell(**kw)
    return rows, time.perf_counter() - t0


def run_sweep(spec: SweepSpec) -> tuple[list[dict], list[dict]]:
    """Evaluate every (case, grid value, estimator) cell in grid order.

    Returns the data rows and a per-cell timing table. Rows come out in the
    same order whatever ``spec.workers`` is.
    """
    cells = list(_cells(spec))
    if spec.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_timed, cells))
    else:
        results = [_timed(kw) for kw in cells]
    rows, timing = [], []
    for kw, (cell_rows, dt) in zip(cells, results):
        rows.extend(cell_rows)
        timing.append({"case": kw["case"], "value": kw["value"], "estimator": kw["estimator"],
                       "seconds": dt})
    return rows, timing


def header(spec: SweepSpec) -> str:
    """Comment-prefixed YAML block describing the resolved sweep."""
    doc = {
        "config": spec.scenario.to_mapping(),
        "variable": spec.variable,
        "grid": [_fmt(v) if isinstance(v, float) else v for v in spec.grid],
        "estimators": list(spec.estimators),
        "tiers": list(spec.tiers),
        "quantity": spec.quantity,
        "trials": spec.trials,
        "seed": spec.seed,
        "cases": [{"name": c.name, "config": dict(c.overrides),
                   **({"N_f": _fmt(c.N_f)} if c.N_f is not None else {}),
                   **({"sinr_mode": c.sinr_mode} if c.sinr_mode else {})} for c in spec.cases],
    }
    if spec.device is not None:
        doc["device"] = spec.device
    if spec.quantity == "throughput":
        doc["N_f"] = _fmt(spec.N_f)
        doc["sinr_mode"] = spec.sinr_mode
    if "gauss-chebyshev" in spec.estimators:
        doc["quad_order"] = spec.quad_order
    if spec.isolated:
        doc["isolated"] = True
    text = yaml.safe_dump(doc, sort_keys=False, default_flow_style=False, width=1000)
    return "".join(f"# {line}\n" for line in text.splitlines())


def render_csv(spec: SweepSpec, rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(header(spec))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


def render_timing(timing: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("case", "value", "estimator", "seconds"))
    for t in timing:
        w.writerow([t["case"], _fmt(t["value"]), t["estimator"], f"{t['seconds']:.3f}"])
    return buf.getvalue()


def write_sweep(spec: SweepSpec, rows: list[dict], timing: list[dict] | None = None,
                path: str | Path | None = None) -> Path:
    """Write the CSV and, if given, the wall-clock sidecar ``<path>.timing.csv``."""
    path = Path(path or spec.output_path or "sweep.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(spec, rows))
    if timing is not None:
        Path(str(path) + ".timing.csv").write_text(render_timing(timing))
    return path


SPEC_KEYS = {"config", "config_file", "variable", "grid", "estimators", "trials", "seed",
             "output", "tiers", "cases", "device", "quantity", "N_f", "sinr_mode",
             "quad_order", "workers", "isolated"}


def spec_from_mapping(doc: Mapping[str, Any], base_dir: Path | None = None) -> SweepSpec:
    if not isinstance(doc, Mapping):
        raise ConfigError("sweep spec must be a mapping")
    unknown = sorted(set(doc) - SPEC_KEYS)
    if unknown:
        raise ConfigError(f"unknown sweep spec key(s): {', '.join(unknown)}")
    if "config_file" in doc:
        cfg_path = Path(doc["config_file"])
        if base_dir is not None and not cfg_path.is_absolute():
            cfg_path = base_dir / cfg_path
        scenario = load_config(cfg_path)
    else:
        scenario = NetworkConfig()
    scenario = with_overrides(scenario, doc.get("config") or {})

    cases = []
    for k, c in enumerate(doc.get("cases") or [{"name": "base"}]):
        if not isinstance(c, Mapping):
            raise ConfigError(f"case #{k + 1} must be a mapping")
        extra = set(c) - {"name", "config", "N_f", "sinr_mode"}
        if extra:
            raise ConfigError(f"case #{k + 1}: unknown key(s) {sorted(extra)}")
        cases.append(Case(name=str(c.get("name", f"case{k + 1}")),
                          overrides=dict(c.get("config") or {}),
                          N_f=_number(c["N_f"]) if "N_f" in c else None,
                          sinr_mode=c.get("sinr_mode")))
    for c in cases:
        with_overrides(scenario, c.overrides)  # fail early on bad overrides

    variable = doc.get("variable")
    grid = doc.get("grid", [None] if variable is None else [])
    if not isinstance(grid, (list, tuple)):
        raise ConfigError("grid must be a list")
    if variable == "N_f":
        grid = [_number(v) for v in grid]
    estimators = doc.get("estimators", ["exact"])
    if isinstance(estimators, str):
        estimators = [e for e in estimators.replace(",", " ").split() if e]
    tiers = doc.get("tiers", list(TIERS))
    if isinstance(tiers, str):
        tiers = [tiers]
    return SweepSpec(
        scenario=scenario, variable=variable, grid=tuple(grid), estimators=tuple(estimators),
        trials=int(doc.get("trials", 100_000)), seed=int(doc.get("seed", 0)),
        output_path=doc.get("output"), tiers=tuple(tiers), cases=tuple(cases),
        device=None if doc.get("device") is None else int(doc["device"]),
        quantity=doc.get("quantity", "coverage"), N_f=_number(doc.get("N_f", math.inf)),
        sinr_mode=doc.get("sinr_mode", "threshold"), quad_order=int(doc.get("quad_order", 100)),
        workers=int(doc.get("workers", 1)), isolated=bool(doc.get("isolated", False)),
    )


def load_sweep_spec(path: str | Path) -> SweepSpec:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read sweep spec {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from None
    try:
        return spec_from_mapping(doc or {}, base_dir=path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
