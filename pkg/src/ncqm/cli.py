"""Command-line interface: ``ncqm {spectrum,pzv,classical,checks}``.

Configuration comes from an optional ``key = value`` file (``--config``)
overridden by command-line flags.  Results go to ``--out`` (written
atomically) or standard output, as CSV or JSON.

Exit status: 0 all checks pass, 1 a numerical tolerance failed,
2 configuration error.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import classical, overlap, spectra, states
from ._backend import BACKEND
from .errors import DegenerateModel, DomainError
from .qspace import ModelParams, edge_mask, position_momentum_ops, random_state

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# config key -> (type, default)
_KEYS = {
    "model": (str, None),
    "theta": (float, 0.2),
    "mass": (float, 1.0),
    "hbar": (float, 1.0),
    "omega_l": (float, 1.0),
    "omega_r": (float, 0.0),
    "trunc": (int, 64),
    "out": (str, None),
    "format": (str, "csv"),
    "seed": (int, 12345),
    "levels": (int, 6),
    "k": (complex, 1.0),
    "grid": (int, 5),
    "extent": (float, 1.0),
    "integral_spacing": (float, 0.25),
    "potential": (str, "harmonic"),
    "z0": (complex, 1.0),
    "zdot0": (complex, 0.5j),
    "t_end": (float, 10.0),
    "dt": (float, 1e-3),
    "points": (int, 10),
}

_MODEL_DEFAULT = {"spectrum": "oscillator", "pzv": "oscillator", "classical": "classical", "checks": "checks"}
_MODELS = {
    "spectrum": {"oscillator"},
    "pzv": {"free", "oscillator"},
    "classical": {"classical"},
    "checks": {"checks"},
}


class ConfigError(ValueError):
    pass


def _complex(text):
    if isinstance(text, complex):
        return text
    return complex(str(text).replace(" ", "").replace("i", "j"))


def _convert(key, raw):
    typ = _KEYS[key][0]
    try:
        if typ is complex:
            return _complex(raw)
        if typ is int:
            val = float(raw)
            if val != int(val):
                raise ValueError
            return int(val)
        return typ(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        out[key] = _convert(key, val)
    return out


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)
    expect_l_drift: bool = False
    no_numeric: bool = False

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def params(self):
        return ModelParams(
            m=self.mass, hbar=self.hbar, theta=self.theta, omega_l=self.omega_l, omega_r=self.omega_r
        )

    def validate(self):
        try:
            self.params
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not 8 <= self.trunc <= 256:
            raise ConfigError(f"trunc must lie in [8, 256], got {self.trunc}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.model not in _MODELS[self.command]:
            raise ConfigError(f"model {self.model!r} not valid for {self.command}")
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigError("dt and t_end must be positive")
        if self.levels < 1 or self.grid < 1 or self.points < 1:
            raise ConfigError("levels, grid and points must be positive")

    def items(self):
        out = [(k, self.values[k]) for k in _KEYS]
        if self.command == "classical":
            out.append(("expect_l_drift", self.expect_l_drift))
        if self.command == "spectrum":
            out.append(("no_numeric", self.no_numeric))
        return out


def build_config(args):
    vals = {k: d for k, (_, d) in _KEYS.items()}
    vals["model"] = _MODEL_DEFAULT[args.command]
    if args.config:
        vals.update(read_config_file(args.config))
    for key in _KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            vals[key] = _convert(key, flag)
    cfg = RunConfig(
        args.command,
        vals,
        expect_l_drift=getattr(args, "expect_l_drift", False),
        no_numeric=getattr(args, "no_numeric", False),
    )
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------
def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "nan" if math.isnan(x) else f"{x:.17g}"
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return str(x)


def _json_value(x):
    """JSON text for one value; floats carry 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "null" if not math.isfinite(x) else f"{x:.17g}"
    if isinstance(x, complex):
        return _json_value({"re": x.real, "im": x.imag})
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in x) + "]"
    return json.dumps(str(x))


@dataclass
class Report:
    columns: list
    rows: list
    checks: list  # (name, value, threshold, passed)

    def passed(self):
        return all(c[3] for c in self.checks)

    def render(self, cfg):
        if cfg.format == "json":
            doc = {
                "config": [{"key": k, "value": v} for k, v in cfg.items()],
                "results": [dict(zip(self.columns, r)) for r in self.rows],
                "checks": [
                    {"name": n, "value": v, "threshold": t, "passed": bool(p)} for n, v, t, p in self.checks
                ],
            }
            return _json_value(doc) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(x) for x in r])
        return buf.getvalue()

    def summary(self):
        lines = []
        for n, v, t, p in self.checks:
            lines.append(f"{'PASS' if p else 'FAIL'} {n} value={_fmt(v)} threshold={_fmt(t)}")
        return "\n".join(lines) + "\n"


def write_atomic(path, text):
    """Write ``text`` to ``path`` through a temporary file and rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".ncqm-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------
def cmd_spectrum(cfg):
    p, n = cfg.params, cfg.trunc
    try:
        levels = spectra.ho_lowest_levels(p, cfg.levels)
    except DegenerateModel as exc:
        raise ConfigError(str(exc)) from None
    numeric = [math.nan] * len(levels)
    method = "none"
    tail = math.nan
    if not cfg.no_numeric:
        tail = abs(spectra.bogoliubov(p).Gamma) ** (2 * n)
        if n <= 32:
            numeric = list(spectra.ho_dense_eigenvalues(p, n, cfg.levels))
            method = "dense"
        else:
            numeric = [e for e, _ in spectra.ho_compressed_spectrum(p, n, cfg.levels)]
            method = "sectors"
    rows, checks = [], []
    for (E, n1, n2), En in zip(levels, numeric):
        d = abs(E - En)
        rows.append((n1, n2, E, En, d, method))
        if not cfg.no_numeric:
            checks.append((f"level({n1},{n2})", d, 1e-6, bool(d < 1e-6)))
    if not cfg.no_numeric:
        # informational: ground-state weight beyond the truncation
        checks.append(("ground_tail_Gamma^(2N)", tail, 1.0, True))
    return Report(["n1", "n2", "E_formula", "E_numeric", "abs_delta", "method"], rows, checks)


def _grid_points(cfg):
    m = cfg.grid
    ax = np.linspace(-cfg.extent, cfg.extent, m) if m > 1 else np.zeros(1)
    zr, zi, vr, vi = np.meshgrid(ax, ax, ax, ax, indexing="ij")
    return (zr + 1j * zi).ravel(), (vr + 1j * vi).ravel()


def cmd_pzv(cfg):
    p, n = cfg.params, cfg.trunc
    z, v = _grid_points(cfg)
    ok = overlap.zv_guard(z, v, n)
    if not ok.all():
        raise ConfigError(f"grid extent {cfg.extent} leaves the representable region at N={n}")
    checks = []
    try:
        if cfg.model == "free":
            psi = spectra.momentum_state(cfg.k, p, n)
            closed = spectra.free_pzv_closed(cfg.k, z, v, p)
        else:
            bog = spectra.bogoliubov(p)
            psi = spectra.ho_ground_state(bog, n)
            closed = spectra.ho_ground_pzv_closed(z, v, bog.Gamma)
    except (DomainError, DegenerateModel) as exc:
        raise ConfigError(str(exc)) from None
    num = np.abs(overlap.overlap_zv(psi, z, v)) ** 2
    delta = np.abs(num - closed)
    rows = [(a.real, a.imag, b.real, b.imag, c, d, e) for a, b, c, d, e in zip(z, v, closed, num, delta)]
    checks.append(("max_abs_delta", float(delta.max()), 1e-8, bool(delta.max() < 1e-8)))
    if cfg.model == "oscillator":
        grid = states.QuadratureGrid.uniform_disc(math.sqrt(n / 2.0), cfg.integral_spacing)
        total, skipped = states.integrate_pzv(psi, grid)
        # informational: limited by the representable region at this N
        checks.append(("grid_integral", total, 1.0, True))
        checks.append(("grid_skipped_fraction", skipped, 1.0, True))
    cols = ["Re z", "Im z", "Re v", "Im v", "P_closed", "P_numeric", "abs_delta"]
    return Report(cols, rows, checks)


def _drift(x):
    x = np.asarray(x, dtype=float)
    ref = abs(x[0])
    d = float(np.max(np.abs(x - x[0])))
    return d / ref if ref > 1e-12 else d


def cmd_classical(cfg):
    p = cfg.params
    try:
        if cfg.potential.strip() == "harmonic":
            V = classical.PolynomialPotential.harmonic(p, p.omega_l)
        else:
            V = classical.PolynomialPotential.parse(cfg.potential)
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"unparsable potential: {exc}") from None
    s0 = classical.initial_state(cfg.z0, cfg.zdot0, V, p)
    traj = classical.integrate(s0, V, p, cfg.t_end, cfg.dt)
    rows = [tuple(r) for r in classical.trajectory_rows(traj)]
    El = classical.energy_local(traj.z, traj.v, V, p)
    En = classical.energy_nonlocal(traj)
    L = classical.angular_momentum_general(traj)
    Lm = classical.angular_momentum_general(traj, include_torque=False)
    checks = [
        ("E_local_drift", _drift(El), 1e-6, _drift(El) < 1e-6),
        ("E_nonlocal_drift", _drift(En), 1e-6, _drift(En) < 1e-6),
        ("L_drift", _drift(L), 1e-6, _drift(L) < 1e-6),
    ]
    lm = _drift(Lm)
    if cfg.expect_l_drift:
        checks.append(("L_mechanical_drift_expected", lm, 1e-6, lm > 1e-6))
    else:
        checks.append(("L_mechanical_drift", lm, 1e-6, lm < 1e-6))
    # informational: the two energies differ by a constant fixed at t0
    checks.append(("E_local_minus_E_nonlocal_at_t0", float(El[0] - En[0]), math.inf, True))
    r31 = traj.eq31_residual
    checks.append(("second_order_residual", r31, 100 * cfg.dt**2, bool(r31 < 100 * cfg.dt**2)))
    return Report(list(classical.TRAJECTORY_COLUMNS), rows, checks)


def run_checks(cfg):
    """Deterministic battery of residual checks at ``N = trunc``."""
    p, n = cfg.params, cfg.trunc
    rng = np.random.default_rng(cfg.seed)
    margin = max(2, n // 4)
    ops = position_momentum_ops(p, n)
    hb, th = p.hbar, p.theta
    checks = []

    def add(name, value, thr):
        checks.append((name, float(value), thr, bool(value < thr)))

    # canonical commutators on edge-supported states, compared inside the edge
    psi = random_state(n, rng, margin=margin)
    mask = edge_mask(n, margin // 2)

    def cres(A, B, target):
        r = (A @ B - B @ A)(psi) - target * psi
        return np.linalg.norm(r[mask])

    add("commutator[X,Y]", cres(ops.X, ops.Y, 1j * th), 1e-10)
    add("commutator[X,Px]", cres(ops.X, ops.Px, 1j * hb), 1e-10)
    add("commutator[Y,Py]", cres(ops.Y, ops.Py, 1j * hb), 1e-10)
    add("commutator[X,Py]", cres(ops.X, ops.Py, 0), 1e-10)
    add("commutator[Px,Py]", cres(ops.Px, ops.Py, 0), 1e-10)

    # random (z, v) in a box that shrinks with the truncation below N = 64
    half = 0.6 * min(1.0, math.sqrt(n / 64.0))

    def point():
        z = complex(*rng.uniform(-half, half, 2))
        v = complex(*rng.uniform(-half, half, 2))
        return z, v

    worst_c, worst_d = 0.0, 0.0
    for _ in range(cfg.points):
        s = random_state(n, rng, margin=max(n // 2, n - 12))
        z, v = point()
        r1, r2 = overlap.constraint_residuals(s, z, v)
        worst_c = max(worst_c, abs(r1), abs(r2))
        d = overlap.ladder_dictionary_check(s, z, v)
        worst_d = max(worst_d, max(d.values()))
    add("constraints", worst_c, 1e-6)
    add("ladder_dictionary", worst_d, 1e-8)
    neg = abs(overlap.constraint_residuals(lambda a, b: np.conj(b), 0.3, 0.2j)[0])
    checks.append(("constraints_negative_control", neg, 1e-6, bool(neg > 1e-6)))

    add("identity_resolution", states.identity_resolution_check(n), 1e-6)

    worst_u = 0.0
    for _ in range(cfg.points):
        z, v = point()
        dx, dy = states.position_uncertainty(states.state_zv(z, v, n), p)
        worst_u = max(worst_u, abs(dx * dy - th / 2))
    add("minimal_uncertainty", worst_u, 1e-8)

    L = spectra.angular_momentum_superop(p, n)
    Lc = spectra.angular_momentum_composite(p, n)
    add("angular_momentum_forms", np.linalg.norm((L(psi) - Lc(psi))[mask]), 1e-10)
    return Report(["check", "value", "threshold", "passed"], [c for c in checks], checks)


def cmd_checks(cfg):
    return run_checks(cfg)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "pzv": cmd_pzv,
    "classical": cmd_classical,
    "checks": cmd_checks,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--model")
    common.add_argument("--theta")
    common.add_argument("--mass")
    common.add_argument("--hbar")
    common.add_argument("--omega-l", dest="omega_l")
    common.add_argument("--omega-r", dest="omega_r")
    common.add_argument("--trunc", metavar="N")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", metavar="S")

    ap = argparse.ArgumentParser(prog="ncqm", description=__doc__.splitlines()[0])
    ap.add_argument("--backend", action="store_true", help="print the active kernel backend and exit")
    sub = ap.add_subparsers(dest="command")

    sp = sub.add_parser("spectrum", parents=[common], help="oscillator levels: formula vs numerics")
    sp.add_argument("--levels")
    sp.add_argument("--no-numeric", action="store_true", help="formula only, no diagonalization")

    pz = sub.add_parser("pzv", parents=[common], help="P(z,v): closed form vs overlaps")
    pz.add_argument("--k", help="free-particle momentum (complex, e.g. 1+0.5j)")
    pz.add_argument("--grid", help="points per real axis")
    pz.add_argument("--extent", help="half-width of the grid in each real axis")
    pz.add_argument("--integral-spacing", dest="integral_spacing")

    cl = sub.add_parser("classical", parents=[common], help="integrate the classical (z, v) system")
    cl.add_argument("--potential", help="'harmonic', 'zero', 'iso:c' or 'a b re [im]; ...'")
    cl.add_argument("--z0")
    cl.add_argument("--zdot0")
    cl.add_argument("--t-end", dest="t_end")
    cl.add_argument("--dt")
    cl.add_argument("--expect-l-drift", action="store_true", help="negative control: L must drift")

    ch = sub.add_parser("checks", parents=[common], help="residual checks of the representation")
    ch.add_argument("--points", help="random points per check")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.backend:
        print(BACKEND)
        return EXIT_OK
    if not args.command:
        ap.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = build_config(args)
        report = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"ncqm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.render(cfg)
    if cfg.out:
        write_atomic(cfg.out, text)
        sys.stderr.write(report.summary())
    else:
        sys.stdout.write(text)
        if cfg.format == "csv":
            sys.stderr.write(report.summary())
    return EXIT_OK if report.passed() else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
