"""Config-driven experiment runner with deterministic CSV artifacts.

Scenarios are flat INI files with one section per parameter group
(profile, data, solver, certify, gevrey, verdict).  A run resolves its
scenario (builtin name or config file path), executes one task
pipeline, and writes plot-ready CSVs into ``<out>/<name>-<hash>/``
where the hash is taken over the raw config text.  Re-running an
identical config therefore lands in the same directory with
byte-identical contents; wall-clock timing is printed to stdout but
never written to a file.

Exit codes: 0 on success (verdict outcomes are recorded data, not
process errors), 2 for unreadable or ill-typed configuration, 3 for
scenario validation failures, 4 for numerical failures raised by the
pipelines.
"""

from __future__ import annotations

import argparse
import configparser
import csv as _csvmod
import hashlib
import math
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .diagonalization import certify_modes, growth_weight_log
from .errors import ConfigError, NumericalError, ScenarioError
from .gevrey import (
    LogConvexSequence,
    boundedness_gate,
    build_gevrey_data,
    decay_check,
    moment_check,
    weighted_initial_energy,
)
from .lattice import LatticeField, delta, dtft_on_grid, torus_grid
from .profiles import (
    SpeedProfile,
    build_example1,
    build_example2,
    constant_profile,
    gec_case,
    lambda_applicable,
    verify_hypotheses,
)
from .solver import integrate_modes, sample_schedule, simulate, xi_norms_of_grid

_TASKS = ("simulate", "certify-gec", "certify-lambda", "gevrey-gate", "hypotheses")
_DATA_FAMILIES = ("delta", "box", "gevrey", "csv")
_GEVREY_KINDS = ("sine-power", "exp-flat")
_CASES = ("i", "ii", "iii", "none", "neither")
_NAME_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_")


# -- scenario loading --------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """A validated experiment description plus its config provenance."""

    name: str
    description: str
    task: str
    profile: SpeedProfile
    data_family: str
    data: dict
    tol: float
    horizon: float
    grid: int
    dim: int
    samples: int
    modes: int
    slack: float
    conserve_tol: float | None
    seq_nu: float
    seq_rho: float
    n_grid: tuple
    threshold: float
    moment_order: int | None
    bound_check: bool
    expect_case: str | None
    text: str
    digest: str


@dataclass(frozen=True)
class Verdict:
    """One named outcome; ``passed=None`` marks an informational entry."""

    name: str
    passed: bool | None
    detail: str

    @property
    def label(self) -> str:
        if self.passed is None:
            return "INFO"
        return "PASS" if self.passed else "FAIL"


@dataclass(frozen=True)
class RunReport:
    scenario: str
    task: str
    digest: str
    outdir: str
    files: tuple
    verdicts: tuple
    duration: float

    @property
    def passed(self) -> bool:
        return all(v.passed is not False for v in self.verdicts)


_REQUIRED = object()


def _boolean(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(raw)


def _float_list(raw: str) -> tuple:
    return tuple(float(part.strip()) for part in raw.split(",") if part.strip())


def _get(cp: configparser.ConfigParser, section: str, key: str, cast, default=_REQUIRED):
    if not cp.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"missing required key [{section}] {key}")
        return default
    raw = cp.get(section, key).strip()
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"key [{section}] {key} = {raw!r} does not parse as {cast.__name__}")


def _build_profile(cp: configparser.ConfigParser, horizon: float) -> SpeedProfile:
    family = _get(cp, "profile", "family", str)
    try:
        if family == "constant":
            return constant_profile(
                value=_get(cp, "profile", "value", float, 1.0),
                m=_get(cp, "profile", "m", int, 2),
            )
        if family == "example1":
            lam = _get(cp, "profile", "lam", str, None)
            if lam is not None and lam != "auto":
                raise ScenarioError("lam supports only the value 'auto'")
            return build_example1(
                p=_get(cp, "profile", "p", float),
                q=_get(cp, "profile", "q", float),
                r=_get(cp, "profile", "r", float, 0.0),
                chi=_get(cp, "profile", "chi", str, "cos_offset"),
                m=_get(cp, "profile", "m", int, 2),
                lam=lam,
            )
        if family == "example2":
            return build_example2(
                eta=_get(cp, "profile", "eta", float, 3.0),
                alpha=_get(cp, "profile", "alpha", float, 1.0),
                beta=_get(cp, "profile", "beta", float, 1.0),
                kappa=_get(cp, "profile", "kappa", float, 1.0),
                m=_get(cp, "profile", "m", int, 2),
                horizon=horizon,
            )
    except ValueError as exc:
        raise ScenarioError(f"profile rejected: {exc}")
    raise ScenarioError(f"unknown profile family {family!r}")


def _parse_data(cp: configparser.ConfigParser) -> tuple:
    family = _get(cp, "data", "family", str, "delta")
    if family not in _DATA_FAMILIES:
        raise ScenarioError(f"unknown data family {family!r}; choose from {', '.join(_DATA_FAMILIES)}")
    params: dict = {}
    if family == "box":
        params["width"] = _get(cp, "data", "width", int, 4)
        if params["width"] < 1:
            raise ScenarioError("box width must be at least 1")
    elif family == "gevrey":
        kind = _get(cp, "data", "kind", str)
        if kind not in _GEVREY_KINDS:
            raise ScenarioError(f"unknown gevrey data kind {kind!r}; choose from {', '.join(_GEVREY_KINDS)}")
        params["kind"] = kind
        params["truncation"] = _get(cp, "data", "truncation", int, 128)
        if kind == "sine-power":
            params["M0"] = _get(cp, "data", "M0", float)
            if params["M0"] <= 0:
                raise ScenarioError("sine-power data needs M0 > 0")
        else:
            params["rho"] = _get(cp, "data", "rho", float)
            params["kappa"] = _get(cp, "data", "kappa", float)
            if params["rho"] <= 0 or params["kappa"] <= 0:
                raise ScenarioError("exp-flat data needs rho > 0 and kappa > 0")
        if params["truncation"] < 16:
            raise ScenarioError("gevrey data truncation must be at least 16")
    elif family == "csv":
        for slot in ("u0", "u1"):
            path = _get(cp, "data", slot, str, None)
            if path is not None:
                if not Path(path).is_file():
                    raise ScenarioError(f"data file {path!r} does not exist")
                params[slot] = path
        if not params:
            raise ScenarioError("csv data needs at least one of u0 = <path>, u1 = <path>")
    return family, params


def parse_scenario(text: str) -> Scenario:
    """Parse and validate one scenario config; see module docstring."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config does not parse: {exc}")

    name = _get(cp, "scenario", "name", str)
    if not name or not set(name) <= _NAME_CHARS:
        raise ScenarioError(f"scenario name {name!r} must use only letters, digits, '-' and '_'")
    description = _get(cp, "scenario", "description", str, "")
    task = _get(cp, "scenario", "task", str)
    if task not in _TASKS:
        raise ScenarioError(f"unknown task {task!r}; choose from {', '.join(_TASKS)}")

    tol = _get(cp, "solver", "tol", float, 1e-10)
    horizon = _get(cp, "solver", "horizon", float, 100.0)
    grid = _get(cp, "solver", "grid", int, 64)
    dim = _get(cp, "solver", "dim", int, 1)
    samples = _get(cp, "solver", "samples", int, 48)
    if tol <= 0:
        raise ScenarioError("solver tol must be positive")
    if horizon <= 0:
        raise ScenarioError("solver horizon must be positive")
    if grid < 2 or grid & (grid - 1):
        raise ScenarioError(f"grid size {grid} must be a power of two (at least 2)")
    if not 1 <= dim <= 3:
        raise ScenarioError("dim must be 1, 2 or 3")
    if samples < 1:
        raise ScenarioError("samples per decade must be at least 1")

    profile = _build_profile(cp, horizon)
    data_family, data = _parse_data(cp)
    if data_family == "gevrey" and dim != 1:
        raise ScenarioError("gevrey data lives on the 1-d lattice")

    modes = _get(cp, "certify", "modes", int, 32)
    slack = _get(cp, "certify", "slack", float, 1e-6)
    if modes < 1:
        raise ScenarioError("certify modes must be at least 1")
    if slack < 0:
        raise ScenarioError("certify slack must be nonnegative")

    seq_nu = _get(cp, "gevrey", "nu", float, 2.0)
    seq_rho = _get(cp, "gevrey", "rho", float, 1.0)
    threshold = _get(cp, "gevrey", "threshold", float, 10.0)
    n_grid = _get(cp, "gevrey", "n_grid", _float_list, (1.0, 2.0, 4.0, 8.0, 16.0, 32.0))
    moment_order = _get(cp, "gevrey", "moment_order", int, None)
    bound_check = _get(cp, "gevrey", "bound", _boolean, False)
    if seq_nu < 1:
        raise ScenarioError("gevrey nu must be at least 1")
    if seq_rho <= 0 or threshold <= 0:
        raise ScenarioError("gevrey rho and threshold must be positive")
    if not n_grid or any(n <= 0 for n in n_grid) or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ScenarioError("gevrey n_grid must be a strictly increasing list of positive values")
    if moment_order is not None and moment_order < 0:
        raise ScenarioError("gevrey moment_order must be nonnegative")

    conserve_tol = _get(cp, "verdict", "conserve_tol", float, None)
    if conserve_tol is not None and conserve_tol <= 0:
        raise ScenarioError("conserve_tol must be positive")
    expect_case = _get(cp, "verdict", "expect_case", str, None)
    if expect_case is not None and expect_case not in _CASES:
        raise ScenarioError(f"expect_case {expect_case!r} must be one of {', '.join(_CASES)}")

    return Scenario(
        name=name,
        description=description,
        task=task,
        profile=profile,
        data_family=data_family,
        data=data,
        tol=tol,
        horizon=horizon,
        grid=grid,
        dim=dim,
        samples=samples,
        modes=modes,
        slack=slack,
        conserve_tol=conserve_tol,
        seq_nu=seq_nu,
        seq_rho=seq_rho,
        n_grid=n_grid,
        threshold=threshold,
        moment_order=moment_order,
        bound_check=bound_check,
        expect_case=expect_case,
        text=text,
        digest=hashlib.sha256(text.encode()).hexdigest()[:12],
    )


def load_scenario(source: str) -> Scenario:
    """Resolve ``source`` as a builtin scenario name or a config file path."""
    if source in BUILTIN_CONFIGS:
        return parse_scenario(BUILTIN_CONFIGS[source])
    path = Path(source)
    if not path.is_file():
        raise ConfigError(
            f"{source!r} is neither a builtin scenario nor a config file; try 'sdwavelab list'"
        )
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {source!r}: {exc}")
    return parse_scenario(text)


# -- initial data ------------------------------------------------------------


def _field_from_csv(path: str, dim: int) -> LatticeField:
    pairs = []
    try:
        with open(path, newline="") as fh:
            for row in _csvmod.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if len(row) not in (dim + 1, dim + 2):
                    raise ScenarioError(
                        f"{path}: each row needs {dim} indices plus re [, im]; got {len(row)} fields"
                    )
                key = tuple(int(part) for part in row[:dim])
                re = float(row[dim])
                im = float(row[dim + 1]) if len(row) == dim + 2 else 0.0
                pairs.append((key, complex(re, im)))
    except (OSError, ValueError) as exc:
        raise ScenarioError(f"cannot read lattice data from {path!r}: {exc}")
    return LatticeField.from_pairs(dim, pairs)


def _initial_data(sc: Scenario) -> tuple:
    """(u0, u1, gevrey_data or None) for the scenario's data family."""
    if sc.data_family == "delta":
        return delta(sc.dim), delta(sc.dim), None
    if sc.data_family == "box":
        width = sc.data["width"]
        mesh = np.meshgrid(*([np.arange(width)] * sc.dim), indexing="ij")
        keys = np.stack([m.ravel() for m in mesh], axis=1)
        pairs = [(tuple(int(v) for v in row), 1.0) for row in keys]
        return LatticeField.from_pairs(sc.dim, pairs), LatticeField.zero(sc.dim), None
    if sc.data_family == "gevrey":
        g = build_gevrey_data(
            sc.data["kind"],
            M0=sc.data.get("M0"),
            rho=sc.data.get("rho"),
            kappa=sc.data.get("kappa"),
            truncation=sc.data["truncation"],
        )
        return LatticeField.zero(1), g.field, g
    u0 = _field_from_csv(sc.data["u0"], sc.dim) if "u0" in sc.data else LatticeField.zero(sc.dim)
    u1 = _field_from_csv(sc.data["u1"], sc.dim) if "u1" in sc.data else LatticeField.zero(sc.dim)
    return u0, u1, None


# -- CSV emission ------------------------------------------------------------


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class _OutputDir:
    """Single writer for one run's directory; tracks emitted files."""

    def __init__(self, root: Path, sc: Scenario) -> None:
        self.path = root / f"{sc.name}-{sc.digest}"
        self.digest = sc.digest
        self.files: list[str] = []

    def write_csv(self, basename: str, columns, rows) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        with open(self.path / basename, "w", newline="") as fh:
            fh.write(f"# config={self.digest} version={__version__}\n")
            writer = _csvmod.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(x) for x in row])
        self.files.append(basename)


# -- task pipelines ----------------------------------------------------------


def _hypothesis_rows(report) -> list:
    return [(r.name, r.holds, r.fitted_constant, r.worst_t) for r in report.records]


def _run_simulate(sc: Scenario, out: _OutputDir) -> list:
    grid = torus_grid(sc.dim, sc.grid)
    u0, u1, _ = _initial_data(sc)
    times = sample_schedule(sc.horizon, per_decade=sc.samples)
    trace = simulate(sc.profile, u0, u1, grid, times, tol=sc.tol)
    e0 = float(trace.total[0])
    if e0 <= 0:
        raise ScenarioError("initial total energy vanishes; nothing to track")
    ratio = trace.total / e0
    out.write_csv("energy.csv", ("t", "energy", "ratio"), zip(times, trace.total, ratio))
    if sc.conserve_tol is not None:
        drift = float(np.max(np.abs(ratio - 1.0)))
        return [Verdict(
            "conservation",
            drift <= sc.conserve_tol,
            f"max |E(t)/E(0) - 1| = {drift:.3e} against tolerance {sc.conserve_tol:g}",
        )]
    return [Verdict(
        "growth", None,
        f"E(T)/E(0) = {float(ratio[-1]):.6g}, peak ratio {float(np.max(ratio)):.6g}",
    )]


def _run_hypotheses(sc: Scenario, out: _OutputDir) -> list:
    report = verify_hypotheses(sc.profile)
    out.write_csv("hypotheses.csv", ("hypothesis", "holds", "fitted_constant", "worst_t"), _hypothesis_rows(report))
    out.write_csv(
        "derivative_constants.csv", ("order", "constant"),
        [(k + 1, c) for k, c in enumerate(report.derivative_constants)],
    )
    for rec in report.records:
        print(f"  {rec.name:9s} {'holds' if rec.holds else 'FAILS':6s} "
              f"constant {rec.fitted_constant:<12.6g} worst t {rec.worst_t:g}")
    case = gec_case(sc.profile, report) or "none"
    lam_ok = sc.profile.lam is not None and lambda_applicable(report)
    verdicts = [Verdict("regime", None, f"two-sided case {case}; weighted-zone estimate applicable: {lam_ok}")]
    if sc.expect_case is not None:
        verdicts.append(Verdict("expected-case", case == sc.expect_case, f"case {case}, expected {sc.expect_case}"))
    return verdicts


def _certified_ratios(sc: Scenario, times: np.ndarray, grid, u0, u1) -> tuple:
    """Distinct-frequency representatives, their data values and measured ratios."""
    xi_all = xi_norms_of_grid(grid)
    v0_all = dtft_on_grid(u0, grid)
    w0_all = dtft_on_grid(u1, grid)
    _, first = np.unique(np.round(xi_all, 12), return_index=True)
    count = min(sc.modes, len(first))
    sel = np.unique(np.round(np.linspace(0, len(first) - 1, count)).astype(int))
    rep = np.sort(first[sel])
    xi_sel = xi_all[rep]
    v0, w0 = v0_all[rep], w0_all[rep]
    d0 = np.abs(w0) ** 2 + (sc.profile.value(0.0) * xi_sel) ** 2 * np.abs(v0) ** 2
    if np.any(d0 <= 0):
        raise ScenarioError(
            "initial data has a spectral zero at a certified mode; "
            "certify scenarios need data with nonvanishing spectrum (delta)"
        )
    states = integrate_modes(sc.profile, xi_sel, v0, w0, 0.0, float(times[-1]), times, tol=sc.tol)
    a_vals = np.array([sc.profile.value(t) for t in times])
    dens = np.abs(states[:, 1, :]) ** 2 + (a_vals[:, None] * xi_sel[None, :]) ** 2 * np.abs(states[:, 0, :]) ** 2
    return xi_sel, dens / d0[None, :]


def _run_certify(sc: Scenario, out: _OutputDir, flavor: str) -> list:
    if flavor == "lambda" and sc.profile.lam is None:
        raise ScenarioError("certify-lambda needs a profile with a lam control function (example1 lam = auto)")
    grid = torus_grid(sc.dim, sc.grid)
    u0, u1, _ = _initial_data(sc)
    times = sample_schedule(sc.horizon, per_decade=sc.samples)
    report = verify_hypotheses(sc.profile)
    out.write_csv("hypotheses.csv", ("hypothesis", "holds", "fitted_constant", "worst_t"), _hypothesis_rows(report))

    xi_sel, ratios = _certified_ratios(sc, times, grid, u0, u1)
    certs = certify_modes(sc.profile, xi_sel, times, sc.dim, flavor=flavor, report=report)

    rows = []
    mode_rows = []
    violations = 0
    for j, cert in enumerate(certs.certificates):
        meas = ratios[:, j]
        ok = (meas >= cert.lower * (1.0 - sc.slack)) & (meas <= cert.upper * (1.0 + sc.slack))
        violations += int(np.sum(~ok))
        rows.extend(
            (cert.xi_norm, t, meas[i], cert.lower[i], cert.upper[i], bool(ok[i]))
            for i, t in enumerate(times)
        )
        mode_rows.append((cert.xi_norm, cert.t_xi, cert.N_used,
                          cert.log_lower_const, cert.log_upper_const, cert.c_rm))
    out.write_csv("certificate.csv", ("xi_norm", "t", "measured", "lower", "upper", "within"), rows)
    out.write_csv(
        "modes.csv",
        ("xi_norm", "t_xi", "N_used", "log_lower_const", "log_upper_const", "c_rm"),
        mode_rows,
    )
    zone = f", N = {certs.partition.N:g}" if certs.partition is not None else ""
    verdicts = [Verdict(
        "envelopes",
        violations == 0,
        f"case {certs.case}{zone}, {violations} violations over {ratios.size} samples",
    )]
    if sc.expect_case is not None:
        verdicts.append(Verdict("expected-case", certs.case == sc.expect_case,
                                f"case {certs.case}, expected {sc.expect_case}"))
    return verdicts


def _weighted_bound(sc: Scenario, out: _OutputDir, N0: float, u0, u1, gdata) -> list:
    profile = sc.profile
    log_u = weighted_initial_energy(N0, u0, u1, profile, log_spectrum=gdata.log_spectrum, return_log=True)
    verdicts = [Verdict("weighted-energy", math.isfinite(log_u), f"log U = {log_u:.6g} at N0 = {N0:g}")]

    grid = torus_grid(sc.dim, sc.grid)
    times = sample_schedule(sc.horizon, per_decade=sc.samples)
    trace = simulate(profile, u0, u1, grid, times, tol=sc.tol)
    _, first, inverse = np.unique(np.round(trace.xi_norms, 12), return_index=True, return_inverse=True)
    xi_rep = trace.xi_norms[first]
    certs = certify_modes(profile, xi_rep, times, sc.dim, flavor="lambda")
    w_log = np.array([growth_weight_log(profile, N0, float(x)) for x in xi_rep])
    log_up = np.array([c.log_upper_const for c in certs.certificates])
    finite = np.isfinite(w_log)
    log_c = float(np.max(log_up[finite] - w_log[finite])) if np.any(finite) else -math.inf
    out.write_csv(
        "modes.csv",
        ("xi_norm", "t_xi", "N_used", "log_weight", "log_upper_const"),
        [(c.xi_norm, c.t_xi, c.N_used, w, c.log_upper_const)
         for c, w in zip(certs.certificates, w_log)],
    )

    slack_log = math.log1p(sc.slack)
    d0 = trace.density[0]
    rows = []
    violations = 0
    for j in range(grid.size):
        k = int(inverse[j])
        bound = log_c + w_log[k]
        for i, t in enumerate(times):
            dt = float(trace.density[i, j])
            if d0[j] == 0.0:
                log_ratio = -math.inf if dt == 0.0 else math.inf
                ok = dt == 0.0
            else:
                log_ratio = math.log(dt) - math.log(d0[j]) if dt > 0 else -math.inf
                ok = not math.isfinite(bound) or log_ratio <= bound + slack_log
            violations += int(not ok)
            rows.append((j, float(trace.xi_norms[j]), t, log_ratio, bound, bool(ok)))
    out.write_csv("bound.csv", ("mode", "xi_norm", "t", "log_ratio", "log_bound", "within"), rows)
    verdicts.append(Verdict(
        "weighted-bound",
        violations == 0,
        f"log C = {log_c:.6g}, {violations} violations over {grid.size * len(times)} samples",
    ))
    return verdicts


def _run_gevrey(sc: Scenario, out: _OutputDir) -> list:
    profile = sc.profile
    if profile.lam is None:
        raise ScenarioError("gevrey-gate needs a profile with a lam control function (example1 lam = auto)")
    seq = LogConvexSequence.factorial_power(sc.seq_nu)
    gate = boundedness_gate(sc.n_grid, seq, profile, dim=sc.dim, threshold=sc.threshold)
    out.write_csv(
        "gate.csv", ("N", "log_domination_constant", "domination_constant", "growth_ratio"),
        zip(gate.N_grid, gate.log_domination, gate.domination, gate.growth),
    )
    detail = f"case {gate.case}" + (f", N0 = {gate.N0:g}" if gate.N0 is not None else "")
    verdicts = [Verdict("gate", None, detail)]
    if sc.expect_case is not None:
        verdicts.append(Verdict("expected-case", gate.case == sc.expect_case,
                                f"case {gate.case}, expected {sc.expect_case}"))

    u0, u1, gdata = _initial_data(sc)
    if gdata is not None and sc.moment_order is not None:
        mc = moment_check(gdata.field, sc.moment_order)
        dc = decay_check(gdata.field, seq, sc.seq_rho)
        out.write_csv(
            "data_checks.csv", ("check", "passed", "detail"),
            [
                ("moment", mc.passed,
                 f"worst relative moment {mc.worst_rel!r}"
                 + (f"; first failing alpha {mc.failing}" if mc.failing else "")),
                ("decay", dc.passed, f"log constant {dc.log_constant!r}; worst key {dc.worst_key}"),
            ],
        )
        verdicts.append(Verdict(
            "moments", mc.passed,
            f"moments to total order {sc.moment_order} vanish (worst {mc.worst_rel:.3e})"
            if mc.passed else f"moment at alpha = {mc.failing} does not vanish",
        ))
        verdicts.append(Verdict(
            "decay", dc.passed,
            f"coefficient decay constant log {dc.log_constant:.6g}"
            if math.isfinite(dc.log_constant) else "coefficient decay constant unbounded",
        ))

    if sc.bound_check:
        if gdata is None:
            raise ScenarioError("the weighted bound check needs gevrey data")
        if gate.N0 is None:
            verdicts.append(Verdict("weighted-bound", False,
                                    f"gate case {gate.case} provides no threshold N0"))
        else:
            verdicts.extend(_weighted_bound(sc, out, gate.N0, u0, u1, gdata))
    return verdicts


_RUNNERS = {
    "simulate": _run_simulate,
    "hypotheses": _run_hypotheses,
    "certify-gec": lambda sc, out: _run_certify(sc, out, "theta"),
    "certify-lambda": lambda sc, out: _run_certify(sc, out, "lambda"),
    "gevrey-gate": _run_gevrey,
}


# -- orchestration -----------------------------------------------------------


def _execute(sc: Scenario, out: str, tol: float | None, threads: int) -> RunReport:
    if threads < 1:
        raise ConfigError("--threads must be a positive integer")
    # runs stay single-threaded regardless of --threads: reproducibility first
    if tol is not None:
        if tol <= 0:
            raise ConfigError("--tol must be positive")
        sc = replace(sc, tol=tol)
    start = time.monotonic()
    outdir = _OutputDir(Path(out), sc)
    print(f"scenario {sc.name} [{sc.task}] config {sc.digest}")
    verdicts = tuple(_RUNNERS[sc.task](sc, outdir))
    summary = [
        ("scenario", sc.name, sc.description),
        ("task", sc.task, ""),
        ("config", sc.digest, ""),
        ("version", __version__, ""),
    ]
    summary.extend((f"verdict:{v.name}", v.label, v.detail) for v in verdicts)
    outdir.write_csv("summary.csv", ("key", "value", "detail"), summary)
    report = RunReport(
        scenario=sc.name,
        task=sc.task,
        digest=sc.digest,
        outdir=str(outdir.path),
        files=tuple(outdir.files),
        verdicts=verdicts,
        duration=time.monotonic() - start,
    )
    for name in report.files:
        print(f"  wrote {Path(report.outdir) / name}")
    for v in report.verdicts:
        print(f"  {v.label:4s} {v.name}: {v.detail}")
    print(f"  finished in {report.duration:.1f}s")
    return report


def run(source: str, out: str = "out", tol: float | None = None, threads: int = 1) -> RunReport:
    """Execute the scenario named by ``source`` (builtin name or config path)."""
    return _execute(load_scenario(source), out, tol, threads)


def verify(source: str, out: str = "out", tol: float | None = None, threads: int = 1) -> RunReport:
    """Run only the hypothesis report for the scenario's profile."""
    sc = load_scenario(source)
    return _execute(replace(sc, task="hypotheses"), out, tol, threads)


def list_scenarios(registry: dict | None = None) -> list:
    """(name, task, description) for each registered scenario."""
    if registry is None:
        registry = BUILTIN_CONFIGS
    entries = []
    for name, text in registry.items():
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
        cp.optionxform = str
        cp.read_string(text)
        entries.append((
            name,
            cp.get("scenario", "task", fallback="?"),
            cp.get("scenario", "description", fallback=""),
        ))
    return entries


# -- builtin scenarios -------------------------------------------------------

BUILTIN_CONFIGS: dict = {
    "constant-conservation": """\
[scenario]
name = constant-conservation
description = Constant speed conserves total energy to rounding over t <= 100.
task = simulate

[profile]
family = constant
value = 1.0

[data]
family = delta

[solver]
tol = 1e-10
horizon = 100
grid = 64
dim = 1
samples = 48

[verdict]
conserve_tol = 1e-8
""",
    "example1-case-i": """\
[scenario]
name = example1-case-i
description = Integrable oscillation amplitude (p = 2): two-sided envelopes from the bounded deviation integral.
task = certify-gec

[profile]
family = example1
p = 2
q = 1
r = 0
m = 2

[data]
family = delta

[solver]
tol = 1e-7
horizon = 1000
grid = 64
dim = 1
samples = 48

[certify]
modes = 32
slack = 1e-6

[verdict]
expect_case = i
""",
    "example1-case-ii": """\
[scenario]
name = example1-case-ii
description = m = 1 with integrable inverse derivative control (p = 0.5, q = 0.25): zone-free envelopes.
task = certify-gec

[profile]
family = example1
p = 0.5
q = 0.25
r = 0
m = 1

[data]
family = delta

[solver]
tol = 1e-7
horizon = 1000
grid = 64
dim = 1
samples = 48

[certify]
modes = 32
slack = 1e-6

[verdict]
expect_case = ii
""",
    "example1-case-iii": """\
[scenario]
name = example1-case-iii
description = Full stabilization + oscillation hypothesis set (p = q = 0.5, m = 2): two-zone certificates.
task = certify-gec

[profile]
family = example1
p = 0.5
q = 0.5
r = 0
m = 2

[data]
family = delta

[solver]
tol = 1e-7
horizon = 1000
grid = 64
dim = 1
samples = 48

[certify]
modes = 32
slack = 1e-6

[verdict]
expect_case = iii
""",
    "example2-case-iii": """\
[scenario]
name = example2-case-iii
description = Sparse bump-train speed (alpha = beta = kappa = 1, m = 2): two-zone certificates with N-escalation.
task = certify-gec

[profile]
family = example2
eta = 3
alpha = 1
beta = 1
kappa = 1
m = 2

[data]
family = delta

[solver]
tol = 1e-7
horizon = 1000
grid = 64
dim = 1
samples = 48

[certify]
modes = 32
slack = 1e-6

[verdict]
expect_case = iii
""",
    "example1-lambda": """\
[scenario]
name = example1-lambda
description = Nondecaying slow oscillation (p = 0, q = 0.5, m = 3): weighted-zone certificates on the lam partition.
task = certify-lambda

[profile]
family = example1
p = 0
q = 0.5
r = 0
m = 3
lam = auto

[data]
family = delta

[solver]
tol = 1e-7
horizon = 1000
grid = 64
dim = 1
samples = 48

[certify]
modes = 32
slack = 1e-6
""",
    "example1-hypotheses": """\
[scenario]
name = example1-hypotheses
description = Hypothesis table for p = q = 1, m = 2: the tail condition fails, so no two-sided regime applies.
task = hypotheses

[profile]
family = example1
p = 1
q = 1
r = 0
m = 2

[solver]
horizon = 1000

[verdict]
expect_case = none
""",
    "gevrey-sine-power": """\
[scenario]
name = gevrey-sine-power
description = Trigonometric data with vanishing moments (M0 = 8): data checks plus the class-domination gate.
task = gevrey-gate

[profile]
family = example1
p = 0
q = 0.5
r = 0
m = 3
lam = auto

[data]
family = gevrey
kind = sine-power
M0 = 8
truncation = 64

[solver]
horizon = 10

[gevrey]
nu = 1.5
rho = 1.0
threshold = 10
n_grid = 1, 2, 4, 8, 16, 32
moment_order = 6

[verdict]
expect_case = i
""",
    "gevrey-exp-flat": """\
[scenario]
name = gevrey-exp-flat
description = Exponentially flat data (kappa = 2): growth-ratio gate, weighted initial energy and the weighted bound.
task = gevrey-gate

[profile]
family = example1
p = 0
q = 0.5
r = 0
m = 3
lam = auto

[data]
family = gevrey
kind = exp-flat
rho = 1.0
kappa = 2
truncation = 128

[solver]
tol = 1e-7
horizon = 1000
grid = 64
dim = 1
samples = 48

[certify]
slack = 1e-6

[gevrey]
nu = 2
threshold = 10
n_grid = 1, 2, 4, 8, 16, 32, 64
bound = true

[verdict]
expect_case = ii
""",
    "resonant-growth": """\
[scenario]
name = resonant-growth
description = Exploratory: non-decaying fast oscillation (p = 0, q = 1) pumps energy into resonant modes; no verdict.
task = simulate

[profile]
family = example1
p = 0
q = 1
r = 0
m = 2

[data]
family = delta

[solver]
tol = 1e-7
horizon = 256
grid = 256
dim = 1
samples = 48
""",
}


# -- entry point -------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdwavelab",
        description="Energy experiments for semi-discrete wave equations with time-dependent speed.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", default="out", help="output root directory (default: out)")
    shared.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; execution is single-threaded for reproducibility")
    shared.add_argument("--tol", type=float, default=None, help="override the solver tolerance")
    p_run = sub.add_parser("run", parents=[shared], help="execute a scenario (builtin name or config path)")
    p_run.add_argument("config", help="builtin scenario name or path to an INI config")
    p_verify = sub.add_parser("verify", parents=[shared],
                              help="hypothesis report only for the scenario's profile")
    p_verify.add_argument("config", help="builtin scenario name or path to an INI config")
    p_list = sub.add_parser("list", help="print builtin scenarios")
    p_list.add_argument("--task", default=None, help="only scenarios with this task")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for name, task, desc in list_scenarios():
                if args.task is not None and task != args.task:
                    continue
                print(f"{name:24s} {task:15s} {desc}")
            return 0
        if args.command == "run":
            run(args.config, out=args.out, tol=args.tol, threads=args.threads)
        else:
            verify(args.config, out=args.out, tol=args.tol, threads=args.threads)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
