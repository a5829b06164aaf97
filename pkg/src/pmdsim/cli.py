"""Command-line front end: parameter sweeps to CSV.

All quantities are exchanged in dimensionless groups: lengths in units
of the decoherence length, frequencies through nu = w0/kappa, alpha*w0,
beta*w0 and delta-omega/w0. The gain is twofold: every emitted number
matches a closed formula directly, and rescaling the birefringence
strength at fixed L/L_c provably cannot change any output.

Subcommands
    purity    closed-form purity sweep over length
    pulse     mean intensity profiles and fitted widths
    fig2      polarization negativity surface + critical-length curve
    neg       negativity/witness sweeps (4 modes)
    validate  Monte Carlo vs closed forms with z-scores

Config precedence: command-line flags override an optional key=value
config file; the effective configuration is echoed as a `#` comment on
the first CSV line. Exit codes: 0 success, 2 configuration error,
3 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    BellLabel,
    FiberParameters,
    FrequencyGrid,
    PulseEnvelope,
)
from .stochastic_engine import TrajectoryConfig, ensemble_single, ensemble_two
from .analytic_single import evolve_single_analytic, fitted_width, intensity_profiles, purities
from .analytic_two_separate import (
    chi_factor,
    critical_length_freq,
    critical_length_pol,
    critical_length_pol_limit,
    evolve_separate_bell_pairs,
    frequency_negativity_grid,
    frequency_negativity_separate,
    polarization_negativity_separate,
)
from .analytic_two_common import (
    evolve_common_singlet_pairs,
    polarization_negativity_common,
    ppt_submatrix_tests,
)

__all__ = ["main", "ConfigError", "RangeSpec", "parse_range"]

# smallest believable standard error; guards z-scores on checks that the
# evolution satisfies exactly, where the MC spread is pure float rounding
_SE_FLOOR = 1e-12

_Z_LIMIT = 4.0


class ConfigError(Exception):
    """Invalid flag, range syntax or config-file content."""


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


@dataclass(frozen=True)
class RangeSpec:
    """Parameter sweep `start:stop:count[:log]`, or a single value."""

    start: float
    stop: float
    count: int
    log: bool

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def canonical(self) -> str:
        if self.count == 1 and self.start == self.stop:
            return _fmt(self.start)
        base = f"{_fmt(self.start)}:{_fmt(self.stop)}:{self.count}"
        return base + (":log" if self.log else "")


def parse_range(text: str) -> RangeSpec:
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            x = float(parts[0])
            return RangeSpec(x, x, 1, False)
        if len(parts) in (3, 4):
            log = False
            if len(parts) == 4:
                if parts[3] != "log":
                    raise ConfigError(f"range suffix must be 'log', got {parts[3]!r}")
                log = True
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        else:
            raise ConfigError(f"range syntax is start:stop:count[:log], got {text!r}")
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}: {exc}") from None
    if count < 1:
        raise ConfigError("range count must be at least 1")
    if log and (start <= 0 or stop <= 0):
        raise ConfigError("log ranges need positive endpoints")
    return RangeSpec(start, stop, count, log)


def _load_config_file(path: str) -> dict:
    raw = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = stripped.partition("=")
        raw[key.strip().replace("-", "_")] = value.strip()
    return raw


def _positive_float(key):
    def convert(text):
        x = float(text)
        if x <= 0:
            raise ConfigError(f"{key} must be positive")
        return x

    return convert


def _positive_int(key):
    def convert(text):
        x = int(text)
        if x <= 0:
            raise ConfigError(f"{key} must be positive")
        return x

    return convert


def _seed(text):
    x = int(text)
    if not 0 <= x < 2**64:
        raise ConfigError("seed must fit in an unsigned 64-bit integer")
    return x


_NEG_MODES = ("sep-pol", "sep-freq", "common-pol", "common-ppt")


def _mode(text):
    if text not in _NEG_MODES:
        raise ConfigError(f"mode must be one of {', '.join(_NEG_MODES)}")
    return text


# converter + default per key, per subcommand; None default means the
# key must be provided (only the validate seed)
_SCHEMAS = {
    "purity": {
        "nu": (_positive_float("nu"), 20.0),
        "l_over_lc": (parse_range, parse_range("0.001:100:50:log")),
    },
    "pulse": {
        "nu": (_positive_float("nu"), 20.0),
        "l_over_lc": (parse_range, parse_range("0:100:6")),
        "kappa_tau": (parse_range, parse_range("-8:8:321")),
    },
    "fig2": {
        "alpha_omega0": (_positive_float("alpha_omega0"), 1000.0),
        "beta_omega0": (parse_range, parse_range("10:100000:25:log")),
        "l_over_lc": (parse_range, parse_range("0.001:1:25:log")),
    },
    "neg": {
        "mode": (_mode, None),
        "alpha_omega0": (parse_range, parse_range("10")),
        "beta_omega0": (parse_range, parse_range("20")),
        "l_over_lc": (parse_range, parse_range("0.001:10:25:log")),
        "delta_omega": (_positive_float("delta_omega"), 0.1),
        "nodes": (_positive_int("nodes"), 128),
        "half_width": (
            lambda text: "auto" if text == "auto" else _positive_float("half_width")(text),
            "auto",
        ),
    },
    "validate": {
        "nu": (_positive_float("nu"), 20.0),
        "l_over_lc": (parse_range, parse_range("0.5")),
        "mc_n": (_positive_int("mc_n"), 10000),
        "mc_dz": (
            lambda text: "auto" if text == "auto" else _positive_float("mc_dz")(text),
            "auto",
        ),
        "seed": (_seed, None),
        "workers": (_positive_int("workers"), 1),
    },
}

# keys whose values shape the physics; echoed in the CSV header comment.
# workers and out are excluded on purpose: the output contract makes
# them observationally irrelevant.
_ECHO_KEYS = {
    "purity": ("nu", "l_over_lc"),
    "pulse": ("nu", "l_over_lc", "kappa_tau"),
    "fig2": ("alpha_omega0", "beta_omega0", "l_over_lc"),
    "neg": ("mode", "alpha_omega0", "beta_omega0", "l_over_lc", "delta_omega", "nodes", "half_width"),
    "validate": ("nu", "l_over_lc", "mc_n", "mc_dz", "seed"),
}

_NEG_MODE_ECHO = {
    "sep-pol": ("mode", "alpha_omega0", "beta_omega0", "l_over_lc"),
    "sep-freq": ("mode", "alpha_omega0", "beta_omega0", "l_over_lc", "nodes", "half_width"),
    "common-pol": ("mode", "alpha_omega0", "l_over_lc"),
    "common-ppt": ("mode", "alpha_omega0", "beta_omega0", "delta_omega", "l_over_lc"),
}


def _effective_config(subcommand: str, args: argparse.Namespace) -> dict:
    """Merge flags over config-file entries over schema defaults."""
    schema = _SCHEMAS[subcommand]
    file_raw = _load_config_file(args.config) if args.config else {}
    unknown = set(file_raw) - set(schema) - {"out"}
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    cfg = {}
    for key, (convert, default) in schema.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            cfg[key] = convert(flag_value) if isinstance(flag_value, str) else flag_value
        elif key in file_raw:
            cfg[key] = convert(file_raw[key])
        else:
            if default is None:
                raise ConfigError(f"{key.replace('_', '-')} is required for {subcommand}")
            cfg[key] = default
    cfg["out"] = args.out if args.out is not None else file_raw.get("out")
    return cfg


def _echo_line(subcommand: str, cfg: dict) -> str:
    keys = _ECHO_KEYS[subcommand]
    if subcommand == "neg":
        keys = _NEG_MODE_ECHO[cfg["mode"]]
    parts = [f"command={subcommand}"]
    for key in keys:
        value = cfg[key]
        if isinstance(value, RangeSpec):
            parts.append(f"{key}={value.canonical()}")
        else:
            parts.append(f"{key}={_fmt(value)}")
    return "# " + ",".join(parts)


def _emit(cfg: dict, echo: str, header, rows, path=None) -> int:
    """Write one CSV (to `path`, cfg['out'], or stdout); returns row count."""
    target = path if path is not None else cfg.get("out")
    lines = [echo, ",".join(header)]
    count = 0
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
        count += 1
    text = "\n".join(lines) + "\n"
    if target:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {count} rows to {target}")
    else:
        sys.stdout.write(text)
    return count


def _cmd_purity(cfg: dict) -> int:
    params = FiberParameters.dimensionless()
    rows = []
    for l in cfg["l_over_lc"].values():
        rep = purities(params, cfg["nu"], float(l))
        rows.append((float(l), rep.mu_omega, rep.mu_s, rep.mu_total))
    _emit(cfg, _echo_line("purity", cfg), ["l_over_lc", "mu_omega", "mu_s", "mu_total"], rows)
    return 0


def _cmd_pulse(cfg: dict) -> int:
    params = FiberParameters.dimensionless()
    nu = cfg["nu"]
    kappa = params.omega0 / nu
    kt = cfg["kappa_tau"].values()
    tau = kt / kappa
    rows = []
    for l in cfg["l_over_lc"].values():
        i1, i0 = intensity_profiles(params, nu, float(l), tau)
        width = fitted_width(kt, i1 + i0)
        for j, t in enumerate(kt):
            rows.append((float(l), float(t), float(i1[j]), float(i0[j]), width))
    _emit(
        cfg,
        _echo_line("pulse", cfg),
        ["l_over_lc", "kappa_tau", "intensity_1", "intensity_0", "width"],
        rows,
    )
    return 0


def _cmd_fig2(cfg: dict) -> int:
    if not cfg.get("out"):
        raise ConfigError("fig2 writes two files; --out is required")
    a = cfg["alpha_omega0"]
    betas = cfg["beta_omega0"].values()
    ls = cfg["l_over_lc"].values()
    echo = _echo_line("fig2", cfg)

    surface = []
    for b in betas:
        for l in ls:
            chi = chi_factor(a, float(b), 1.0, float(l))
            n_s = polarization_negativity_separate(chi).value
            surface.append((float(b), float(l), chi, n_s))
    _emit(cfg, echo, ["beta_omega0", "l_over_lc", "chi", "n_s"], surface)

    out = Path(cfg["out"])
    crit_path = out.with_name(out.stem + "_critical" + (out.suffix or ".csv"))
    asymptote = critical_length_pol_limit(a, 1.0)
    crit_rows = [(float(b), critical_length_pol(a, float(b), 1.0)) for b in betas]
    crit_echo = echo + f"\n# asymptote_l_over_lc={_fmt(asymptote)}"
    _emit(cfg, crit_echo, ["beta_omega0", "l_crit_over_lc"], crit_rows, path=crit_path)
    return 0


def _cmd_neg(cfg: dict) -> int:
    mode = cfg["mode"]
    echo = _echo_line("neg", cfg)
    alphas = cfg["alpha_omega0"].values()
    betas = cfg["beta_omega0"].values()
    ls = cfg["l_over_lc"].values()
    rows = []
    if mode == "sep-pol":
        header = ["alpha_omega0", "beta_omega0", "l_over_lc", "chi", "n_s_raw", "n_s", "l_crit_pol_over_lc"]
        for a in alphas:
            for b in betas:
                l_crit = critical_length_pol(float(a), float(b), 1.0)
                for l in ls:
                    chi = chi_factor(float(a), float(b), 1.0, float(l))
                    pol = polarization_negativity_separate(chi)
                    rows.append((float(a), float(b), float(l), chi, pol.raw, pol.value, l_crit))
    elif mode == "sep-freq":
        header = ["alpha_omega0", "beta_omega0", "l_over_lc", "n_omega", "n_omega_grid", "l_crit_freq_over_lc"]
        for a in alphas:
            for b in betas:
                l_crit = critical_length_freq(float(a), float(b), 1.0)
                hw = None if cfg["half_width"] == "auto" else cfg["half_width"]
                for l in ls:
                    n_w = frequency_negativity_separate(float(a), float(b), 1.0, float(l))
                    n_grid = frequency_negativity_grid(
                        float(a), float(b), 1.0, float(l), n_nodes=cfg["nodes"], half_width=hw
                    )
                    rows.append((float(a), float(b), float(l), n_w, n_grid, l_crit))
    elif mode == "common-pol":
        header = ["alpha_omega0", "l_over_lc", "upsilon", "n_s_raw", "n_s", "l_crit_pol_over_lc"]
        for a in alphas:
            for l in ls:
                rep = polarization_negativity_common(float(a), 1.0, float(l))
                rows.append((float(a), float(l), rep.upsilon, rep.n_s_raw, rep.n_s, rep.l_crit_pol))
    else:
        header = [
            "alpha_omega0",
            "beta_omega0",
            "delta_omega",
            "l_over_lc",
            "correlated_ratio",
            "correlated_entangled",
            "anticorrelated_witness",
            "anticorrelated_verdict",
            "g_l",
        ]
        params = FiberParameters.dimensionless()
        dw = cfg["delta_omega"]
        wa, wb = 1.0 + 0.5 * dw, 1.0 - 0.5 * dw
        for a in alphas:
            for b in betas:
                envelope = PulseEnvelope.double(alpha=float(a), beta=float(b), omega0=1.0)
                for l in ls:
                    rep = ppt_submatrix_tests(envelope, params, float(l), wa, wb)
                    rows.append(
                        (
                            float(a),
                            float(b),
                            dw,
                            float(l),
                            rep.correlated_ratio,
                            rep.correlated_entangled,
                            rep.anticorrelated_witness,
                            rep.anticorrelated_verdict,
                            rep.g_l,
                        )
                    )
    _emit(cfg, echo, header, rows)
    return 0


def _validate_checks(cfg: dict):
    """(name, analytic, mc, se) quadruples of the cross-validation suite."""
    params = FiberParameters.dimensionless()
    nu = cfg["nu"]
    kappa = params.omega0 / nu
    l = float(cfg["l_over_lc"].values()[0])
    length = l * params.decoherence_length
    dz = None if cfg["mc_dz"] == "auto" else cfg["mc_dz"]
    mc_cfg = TrajectoryConfig(
        n_trajectories=cfg["mc_n"], seed=cfg["seed"], dz=dz, parallelism=cfg["workers"]
    )

    checks = []

    env1 = PulseEnvelope.single(kappa=kappa, omega0=params.omega0)
    grid = FrequencyGrid.from_nodes(
        np.array([params.omega0 - kappa, params.omega0, params.omega0 + kappa]), params.omega0
    )
    mc1 = ensemble_single(env1, params, length, mc_cfg, grid)
    an1 = evolve_single_analytic(env1, params, l, grid)

    def push(name, analytic, mc_val, se):
        checks.append((name, float(np.real(analytic)), float(np.real(mc_val)), float(se)))

    s1 = mc1.stats
    push("single_rho11_center", an1.kernel[0, 0, 1, 1], mc1.kernel[0, 0, 1, 1], s1.se_re[0, 0, 1, 1])
    push("single_rho00_center", an1.kernel[1, 1, 1, 1], mc1.kernel[1, 1, 1, 1], s1.se_re[1, 1, 1, 1])
    push("single_rho11_offset", an1.kernel[0, 0, 2, 1], mc1.kernel[0, 0, 2, 1], s1.se_re[0, 0, 2, 1])
    push("single_rho10_vanish", 0.0, mc1.kernel[0, 1, 1, 1], s1.se_re[0, 1, 1, 1])

    env2 = PulseEnvelope.double(alpha=5.0, beta=4.0, omega0=params.omega0)
    d = 0.05 * params.omega0
    pairs = np.array(
        [
            [params.omega0 + d, params.omega0 - d],
            [params.omega0 - d, params.omega0 + d],
            [params.omega0, params.omega0],
        ]
    )
    mc_sep = ensemble_two(env2, BellLabel.SINGLET, params, length, mc_cfg, pairs, mode="separate")
    an_sep = evolve_separate_bell_pairs(env2, BellLabel.SINGLET, params, l, pairs)
    s2 = mc_sep.stats
    push("separate_rho1010", an_sep.kernel[0, 1, 0, 1, 0, 0], mc_sep.kernel[0, 1, 0, 1, 0, 0], s2.se_re[0, 1, 0, 1, 0, 0])
    push("separate_rho1001", an_sep.kernel[0, 1, 1, 0, 0, 0], mc_sep.kernel[0, 1, 1, 0, 0, 0], s2.se_re[0, 1, 1, 0, 0, 0])
    traced_an = sum(an_sep.kernel[i, j, i, j, 0, 1] for i in range(2) for j in range(2))
    traced_mc = sum(mc_sep.kernel[i, j, i, j, 0, 1] for i in range(2) for j in range(2))
    traced_se = sum(abs(s2.se_re[i, j, i, j, 0, 1]) for i in range(2) for j in range(2))
    push("separate_traced_offdiag", traced_an, traced_mc, traced_se)

    mc_com = ensemble_two(env2, BellLabel.SINGLET, params, length, mc_cfg, pairs, mode="common")
    an_com = evolve_common_singlet_pairs(env2, params, l, pairs)
    s3 = mc_com.stats
    push("common_rho1001", an_com.kernel[0, 1, 1, 0, 0, 0], mc_com.kernel[0, 1, 1, 0, 0, 0], s3.se_re[0, 1, 1, 0, 0, 0])
    push("common_rho1111", an_com.kernel[0, 0, 0, 0, 0, 0], mc_com.kernel[0, 0, 0, 0, 0, 0], s3.se_re[0, 0, 0, 0, 0, 0])
    push("common_dfs_exact", an_com.kernel[0, 1, 1, 0, 2, 2], mc_com.kernel[0, 1, 1, 0, 2, 2], s3.se_re[0, 1, 1, 0, 2, 2])
    return checks


def _cmd_validate(cfg: dict) -> int:
    rows = []
    failures = 0
    for name, analytic, mc_val, se in _validate_checks(cfg):
        diff = mc_val - analytic
        z = 0.0 if diff == 0.0 else diff / max(se, _SE_FLOOR)
        rows.append((name, analytic, mc_val, se, z))
        status = "PASS" if abs(z) <= _Z_LIMIT else "FAIL"
        if status == "FAIL":
            failures += 1
        print(f"{status} {name} z={z:+.3f}")
    _emit(
        cfg,
        _echo_line("validate", cfg),
        ["check", "analytic", "mc", "std_err", "z"],
        rows,
    )
    print(f"validation: {len(rows) - failures}/{len(rows)} checks passed")
    return 3 if failures else 0


_RUNNERS = {
    "purity": _cmd_purity,
    "pulse": _cmd_pulse,
    "fig2": _cmd_fig2,
    "neg": _cmd_neg,
    "validate": _cmd_validate,
}


def _add_common(sub):
    sub.add_argument("--out", help="output CSV path (default: stdout)")
    sub.add_argument("--config", help="key = value config file; flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmdsim",
        description="Polarization decoherence sweeps: closed forms and Monte Carlo checks.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("purity", help="purity sweep over fiber length")
    p.add_argument("--nu", help="carrier-to-bandwidth ratio w0/kappa (default 20)")
    p.add_argument("--l-over-lc", dest="l_over_lc", help="length range start:stop:count[:log]")
    _add_common(p)

    p = subs.add_parser("pulse", help="mean intensity profiles upstream/downstream of the splitter")
    p.add_argument("--nu", help="carrier-to-bandwidth ratio w0/kappa (default 20)")
    p.add_argument("--l-over-lc", dest="l_over_lc", help="length range start:stop:count[:log]")
    p.add_argument("--kappa-tau", dest="kappa_tau", help="retarded-time range in 1/kappa units")
    _add_common(p)

    p = subs.add_parser("fig2", help="separate-fiber negativity surface and critical curve")
    p.add_argument("--alpha-omega0", dest="alpha_omega0", help="difference-frequency group (default 1000)")
    p.add_argument("--beta-omega0", dest="beta_omega0", help="sum-frequency group range")
    p.add_argument("--l-over-lc", dest="l_over_lc", help="length range start:stop:count[:log]")
    _add_common(p)

    p = subs.add_parser("neg", help="negativity and witness sweeps")
    p.add_argument("--mode", help="sep-pol | sep-freq | common-pol | common-ppt")
    p.add_argument("--alpha-omega0", dest="alpha_omega0", help="difference-frequency group range")
    p.add_argument("--beta-omega0", dest="beta_omega0", help="sum-frequency group range")
    p.add_argument("--l-over-lc", dest="l_over_lc", help="length range start:stop:count[:log]")
    p.add_argument("--delta-omega", dest="delta_omega", help="witness point separation over w0 (common-ppt)")
    p.add_argument("--nodes", help="grid nodes for the discretized cross-check (sep-freq)")
    p.add_argument("--half-width", dest="half_width", help="grid half-width in ridge units (sep-freq)")
    _add_common(p)

    p = subs.add_parser("validate", help="Monte Carlo vs closed forms; exit 3 on any |z| > 4")
    p.add_argument("--nu", help="carrier-to-bandwidth ratio w0/kappa (default 20)")
    p.add_argument("--l-over-lc", dest="l_over_lc", help="single validation length (default 0.5)")
    p.add_argument("--mc-n", dest="mc_n", help="trajectories per ensemble (default 10000)")
    p.add_argument("--mc-dz", dest="mc_dz", help="step in decoherence lengths (default: auto)")
    p.add_argument("--seed", help="RNG seed (required; no wall-clock default)")
    p.add_argument("--workers", help="thread count; output is worker-count invariant")
    _add_common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _effective_config(args.subcommand, args)
        if args.subcommand == "validate" and cfg["l_over_lc"].count != 1:
            raise ConfigError("validate takes a single l-over-lc value")
        return _RUNNERS[args.subcommand](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
