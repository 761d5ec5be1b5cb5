"""
``photonic-demon`` command-line interface.

Values are resolved as command-line flags, then keys of the ``--config`` JSON
file, then built-in defaults.  The resolved values are embedded in every
output, so a document can be regenerated by feeding its ``config`` back in.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from photonic_demon import __version__
from photonic_demon.demon import (
    DEFAULT_WAVELENGTH_NM,
    DistributionStack,
    ModeConfiguration,
    all_configurations,
    configuration_sweep,
    delta_n_distribution,
    effective_temperature,
    equilibration_ensemble,
    fit_family,
    fit_temperature,
    photon_energy,
    randomized_partition_estimate,
    subset_temperatures,
)
from photonic_demon.ensemble import DetectorModel, ensemble_delta_n, ensemble_distributions, mode_flux_histogram
from photonic_demon.errors import NumericalConsistencyError
from photonic_demon.haar import (
    RandomSeed,
    read_unitaries,
    sample_haar,
    sample_haar_ensemble,
    unitary_to_dict,
)
from photonic_demon.haar_average import haar_average, haar_average_empirical
from photonic_demon.interference import (
    DistinguishabilityModel,
    ModelLike,
    OutcomeDistribution,
    full_distribution,
    marginal_mode_distribution,
)
from photonic_demon.io import (
    FORMATS,
    Document,
    delta_n_summary,
    delta_n_table,
    distribution_table,
    parse_float_list,
    parse_int_list,
    write_document,
)
from photonic_demon.symmetric_group import enumerate_partitions, weingarten_cache, weingarten_sum

FIGURES = ("fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "sm_flux", "sm_sweep")

COMMON_DEFAULTS = {"seed": 0, "output": None, "format": "json"}

DEFAULTS: dict[str, dict] = {
    "haar-gen": {"M": 4, "count": 1},
    "weingarten": {"R": 4, "d": 3},
    "outcome-probs": {"M": 4, "N": 3, "inputs": None, "statistics": "indist", "unitary": None},
    "haar-average": {"M": 4, "N": 3, "statistics": "indist", "unitaries": "analytic"},
    "demon run": {
        "M": 4,
        "N": 3,
        "statistics": "indist",
        "mode": "active",
        "unitaries": "analytic",
        "partition": None,
        "measured": None,
        "detector": None,
        "trials": None,
    },
    "demon sweep": {"M": 4, "N": 3, "statistics": "indist", "mode": "active", "unitaries": "analytic", "detector": None},
    "demon randomize": {
        "M": 4,
        "N": 3,
        "statistics": "indist",
        "mode": "passive",
        "unitaries": "100",
        "detector": None,
        "rounds": 1000,
    },
    "equilibrate": {"statistics": "indist", "unitaries": "100"},
    "ensemble": {
        "quantity": "flux",
        "M": 4,
        "N": 3,
        "K": 100,
        "statistics": "indist",
        "mode": "active",
        "detector": None,
        "trials": None,
        "bins": None,
    },
    "temperature": {"density": None, "fit": None, "wavelength_nm": DEFAULT_WAVELENGTH_NM},
    "figure": {"which": None, "K": 100, "statistics": "indist", "detector": None},
}


class UsageError(Exception):
    """Bad user input; reported with exit status 2."""


# -- argument parsing -------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed (default 0)")
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, help="output format (default json)")
    p.add_argument("--config", help="JSON file with default values for this command")


def _demon_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--M", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--statistics", help="dist, indist, or gram=<file>")
    p.add_argument("--mode", choices=("passive", "active"))
    p.add_argument("--unitaries", help="'analytic', an ensemble size K, or a unitary file")
    p.add_argument("--detector", help="comma-separated per-mode count factors")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photonic-demon", description="Photonic Maxwell-demon simulations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("haar-gen", help="sample Haar-random unitaries")
    p.add_argument("--M", type=int)
    p.add_argument("--count", type=int)
    _common(p)

    p = sub.add_parser("weingarten", help="tabulate the unitary Weingarten function")
    p.add_argument("--R", type=int)
    p.add_argument("--d", type=int)
    _common(p)

    p = sub.add_parser("outcome-probs", help="exact outcome distribution for one unitary")
    p.add_argument("--M", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--inputs", help="comma-separated input modes (default 0..N-1)")
    p.add_argument("--statistics", help="dist, indist, or gram=<file>")
    p.add_argument("--unitary", help="unitary file; a Haar sample is drawn when omitted")
    _common(p)

    p = sub.add_parser("haar-average", help="Haar-averaged outcome distribution")
    p.add_argument("--M", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--statistics", help="dist, indist, or gram=<file>")
    p.add_argument("--unitaries", help="'analytic', an ensemble size K, or a unitary file")
    _common(p)

    demon = sub.add_parser("demon", help="Maxwell-demon photon-number differences")
    dsub = demon.add_subparsers(dest="demon_command", required=True)
    p = dsub.add_parser("run", help="dn distribution for one configuration")
    _demon_common(p)
    p.add_argument("--partition", help="subset A modes, e.g. '0,1' (B is the rest)")
    p.add_argument("--measured", help="read-out modes 'a,b'")
    p.add_argument("--trials", type=int, help="sampled trials per unitary (default: exact)")
    _common(p)
    p = dsub.add_parser("sweep", help="<dn> for every configuration")
    _demon_common(p)
    _common(p)
    p = dsub.add_parser("randomize", help="<dn> with random configurations per round")
    _demon_common(p)
    p.add_argument("--rounds", type=int)
    _common(p)

    p = sub.add_parser("equilibrate", help="mode-0 laws after a 3-mode then a 4-mode interferometer")
    p.add_argument("--statistics", help="dist, indist, or gram=<file>")
    p.add_argument("--unitaries", help="'analytic' or an ensemble size K")
    _common(p)

    p = sub.add_parser("ensemble", help="finite-ensemble Monte Carlo")
    p.add_argument("--quantity", choices=("flux", "delta-n"))
    p.add_argument("--M", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--statistics", help="dist, indist, or gram=<file>")
    p.add_argument("--mode", choices=("passive", "active"))
    p.add_argument("--detector", help="comma-separated per-mode count factors")
    p.add_argument("--trials", type=int, help="sampled trials per unitary (default: exact)")
    p.add_argument("--bins", type=int, help="number of histogram bins")
    _common(p)

    p = sub.add_parser("temperature", help="effective temperature from a density or a fit")
    p.add_argument("--density", type=float)
    p.add_argument("--fit", help="JSON file mapping photon number to probability")
    p.add_argument("--wavelength-nm", dest="wavelength_nm", type=float)
    _common(p)

    p = sub.add_parser("figure", help="data behind a named figure")
    p.add_argument("which", nargs="?", choices=FIGURES)
    p.add_argument("--K", type=int)
    p.add_argument("--statistics", help="dist or indist (sm_flux only)")
    p.add_argument("--detector", help="comma-separated per-mode count factors (sm_flux only)")
    _common(p)
    return parser


def command_key(args: argparse.Namespace) -> str:
    if args.command == "demon":
        return f"demon {args.demon_command}"
    return args.command


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags over config-file values over defaults."""
    key = command_key(args)
    defaults = {**COMMON_DEFAULTS, **DEFAULTS[key]}
    from_file: dict = {}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        raw = {k.replace("-", "_"): v for k, v in raw.items() if k != "command"}
        unknown = sorted(set(raw) - set(defaults))
        if unknown:
            raise UsageError(f"unknown config keys for '{key}': {', '.join(unknown)}")
        from_file = raw
    resolved = {}
    for name, default in defaults.items():
        flag = getattr(args, name, None)
        resolved[name] = flag if flag is not None else from_file.get(name, default)
    return resolved


# -- shared helpers -----------------------------------------------------------------------


def _model(statistics: str) -> ModelLike:
    if statistics.startswith("gram="):
        path = statistics.split("=", 1)[1]
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read Gram matrix file {path}: {exc}") from exc
        raw = raw.get("gram", raw) if isinstance(raw, dict) else raw
        arr = np.asarray(raw, dtype=float)
        gram = arr[..., 0] + 1j * arr[..., 1] if arr.ndim == 3 else arr
        return DistinguishabilityModel(gram)
    if statistics.lower() not in ("dist", "indist", "distinguishable", "indistinguishable"):
        raise UsageError(f"statistics must be dist, indist or gram=<file>, got {statistics!r}")
    return statistics.lower()


def _detector(value, M: int) -> Optional[DetectorModel]:
    if value is None:
        return None
    factors = parse_float_list(value)
    if len(factors) != M:
        raise UsageError(f"--detector needs {M} factors, got {len(factors)}")
    return DetectorModel(factors)


def _unitary_source(value) -> tuple[str, object]:
    """``('analytic', None)``, ``('ensemble', K)`` or ``('file', unitaries)``."""
    text = str(value)
    if text == "analytic":
        return "analytic", None
    if text.isdigit():
        K = int(text)
        if K < 1:
            raise UsageError("ensemble size must be positive")
        return "ensemble", K
    if Path(text).exists():
        return "file", read_unitaries(text)
    raise UsageError(f"--unitaries must be 'analytic', a positive integer or an existing file, got {text!r}")


def _stack(cfg: dict, model: ModelLike) -> DistributionStack:
    kind, value = _unitary_source(cfg["unitaries"])
    M, N = cfg["M"], cfg["N"]
    if kind == "analytic":
        if isinstance(model, DistinguishabilityModel):
            raise UsageError("analytic averages need dist or indist statistics")
        return DistributionStack.of(haar_average(M, N, model))
    if kind == "ensemble":
        return ensemble_distributions(value, model, cfg["seed"], M, N)
    return ensemble_distributions(len(value), model, cfg["seed"], M, N, unitaries=value)


def _configuration(cfg: dict) -> ModeConfiguration:
    M = cfg["M"]
    if cfg.get("partition") is None and cfg.get("measured") is None:
        return ModeConfiguration.canonical(M)
    canonical = ModeConfiguration.canonical(M)
    a = parse_int_list(cfg["partition"]) if cfg.get("partition") is not None else canonical.subset_a
    b = tuple(j for j in range(M) if j not in a)
    if cfg.get("measured") is not None:
        ma, mb = parse_int_list(cfg["measured"])
    else:
        ma, mb = a[0], b[0]
    return ModeConfiguration(a, b, ma, mb)


# -- commands -------------------------------------------------------------------------------


def cmd_haar_gen(cfg: dict) -> Document:
    us = sample_haar_ensemble(cfg["M"], cfg["count"], cfg["seed"])
    rows = []
    for k, u in enumerate(us):
        for i in range(u.dim):
            for j in range(u.dim):
                z = u.entries[i, j]
                rows.append([k, i, j, float(z.real), float(z.imag)])
    return Document("haar-gen", cfg, {"count": len(us)}, ["index", "row", "col", "re", "im"], rows)


def cmd_weingarten(cfg: dict) -> Document:
    R, d = cfg["R"], cfg["d"]
    cache = weingarten_cache(R, d)
    rows = []
    for mu in enumerate_partitions(d):
        value = cache.exact(mu)
        rows.append([str(mu), mu.class_size(), float(value), str(value)])
    total = weingarten_sum(R, d)
    summary = {"class_weighted_sum": float(total), "class_weighted_sum_exact": str(total)}
    return Document("weingarten", cfg, summary, ["cycle_type", "class_size", "value", "exact"], rows)


def _distribution_doc(command: str, cfg: dict, dist: OutcomeDistribution, summary: dict) -> Document:
    columns, rows = distribution_table(dist)
    if getattr(dist, "std_errors", None):
        columns = columns + ["std_error"]
        rows = [row + [dist.std_errors[tuple(row[: dist.M])]] for row in rows]
    return Document(command, cfg, {"M": dist.M, "N": dist.N, "total": float(dist.total()), **summary}, columns, rows)


def cmd_outcome_probs(cfg: dict) -> Document:
    M, N = cfg["M"], cfg["N"]
    inputs = parse_int_list(cfg["inputs"]) if cfg["inputs"] is not None else tuple(range(N))
    if cfg["unitary"] is not None:
        us = read_unitaries(cfg["unitary"])
        if len(us) != 1:
            raise UsageError(f"--unitary file must hold exactly one unitary, found {len(us)}")
        u = us[0]
    else:
        u = sample_haar(M, RandomSeed(cfg["seed"]))
    model = _model(cfg["statistics"])
    dist = full_distribution(u, inputs, model)
    return _distribution_doc("outcome-probs", cfg, dist, {"unitary": unitary_to_dict(u)})


def cmd_haar_average(cfg: dict) -> Document:
    model = _model(cfg["statistics"])
    kind, value = _unitary_source(cfg["unitaries"])
    if kind == "analytic":
        if isinstance(model, DistinguishabilityModel):
            raise UsageError("analytic averages need dist or indist statistics")
        dist = haar_average(cfg["M"], cfg["N"], model)
    else:
        us = sample_haar_ensemble(cfg["M"], value, cfg["seed"]) if kind == "ensemble" else value
        dist = haar_average_empirical(us, tuple(range(cfg["N"])), model)
    return _distribution_doc("haar-average", cfg, dist, {"statistics": dist.statistics})


def cmd_demon_run(cfg: dict) -> Document:
    model = _model(cfg["statistics"])
    config = _configuration(cfg)
    detector = _detector(cfg["detector"], cfg["M"])
    active = cfg["mode"] == "active"
    kind, value = _unitary_source(cfg["unitaries"])
    if kind == "analytic":
        if cfg["trials"] is not None:
            raise UsageError("--trials needs a finite ensemble of unitaries")
        if isinstance(model, DistinguishabilityModel):
            raise UsageError("analytic averages need dist or indist statistics")
        dist = delta_n_distribution(haar_average(cfg["M"], cfg["N"], model), config, active, detector)
        summary = {**delta_n_summary(dist), "K": None}
    else:
        K = value if kind == "ensemble" else len(value)
        stats, dist = ensemble_delta_n(
            K, model, cfg["mode"], config, detector, cfg["trials"], cfg["seed"], cfg["M"], cfg["N"],
            unitaries=value if kind == "file" else None,
        )
        summary = {**delta_n_summary(dist), "K": stats.K}
    columns, rows = delta_n_table(dist)
    return Document("demon run", {**cfg, "configuration": config.label}, summary, columns, rows)


def cmd_demon_sweep(cfg: dict) -> Document:
    model = _model(cfg["statistics"])
    stack = _stack(cfg, model)
    detector = _detector(cfg["detector"], cfg["M"])
    sweep = configuration_sweep(stack, cfg["mode"] == "active", detector)
    rows = [[c.label, v] for c, v in sweep.items()]
    values = list(sweep.values())
    summary = {"count": len(rows), "min": min(values), "max": max(values), "K": stack.K}
    return Document("demon sweep", cfg, summary, ["configuration", "mean_dn"], rows)


def cmd_demon_randomize(cfg: dict) -> Document:
    if cfg["rounds"] < 1:
        raise UsageError("--rounds must be positive")
    model = _model(cfg["statistics"])
    stack = _stack(cfg, model)
    detector = _detector(cfg["detector"], cfg["M"])
    active = cfg["mode"] == "active"
    est = randomized_partition_estimate(stack, cfg["rounds"], active, RandomSeed(cfg["seed"], 1), detector)
    fixed = float(stack.delta_n_means(ModeConfiguration.canonical(cfg["M"]), active, detector).mean())
    summary = {"mean": est.mean, "std": est.std, "rounds": est.rounds, "fixed_configuration_mean": fixed, "K": stack.K}
    rows = [[r, float(m)] for r, m in enumerate(est.round_means)]
    return Document("demon randomize", cfg, summary, ["round", "mean_dn"], rows)


def _equilibration_rows(cfg: dict, model: ModelLike) -> tuple[list[list], dict]:
    kind, value = _unitary_source(cfg["unitaries"])
    analytic1 = marginal_mode_distribution(haar_average(3, 3, "indist"), 0)
    analytic2 = marginal_mode_distribution(haar_average(4, 3, "indist"), 0)
    if isinstance(model, str) and model.startswith("dist"):
        analytic1 = marginal_mode_distribution(haar_average(3, 3, "dist"), 0)
        analytic2 = marginal_mode_distribution(haar_average(4, 3, "dist"), 0)
    rows = []
    if kind == "analytic":
        for n in range(4):
            rows.append([n, float(analytic1[n]), float(analytic2[n]), "", "", "", ""])
        return rows, {"K": None}
    if kind != "ensemble":
        raise UsageError("equilibrate takes 'analytic' or an ensemble size")
    res = equilibration_ensemble(value, model, cfg["seed"])
    for n in range(4):
        rows.append([n, float(analytic1[n]), float(analytic2[n]), res.first[n], res.first_se[n], res.second[n], res.second_se[n]])
    return rows, {"K": res.K}


EQUILIBRATION_COLUMNS = ["n", "first_analytic", "second_analytic", "first_mean", "first_se", "second_mean", "second_se"]


def cmd_equilibrate(cfg: dict) -> Document:
    model = _model(cfg["statistics"])
    rows, summary = _equilibration_rows(cfg, model)
    observed = {r[0]: r[5] if r[5] != "" else r[2] for r in rows}
    fit = fit_temperature(observed)
    summary.update({"fit_n_photons": fit.n_photons, "fit_n_modes": fit.n_modes, "fit_temperature_K": fit.temperature})
    return Document("equilibrate", cfg, summary, EQUILIBRATION_COLUMNS, rows)


def cmd_ensemble(cfg: dict) -> Document:
    model = _model(cfg["statistics"])
    detector = _detector(cfg["detector"], cfg["M"])
    if cfg["K"] < 1:
        raise UsageError("--K must be positive")
    if cfg["quantity"] == "flux":
        hist = mode_flux_histogram(cfg["K"], model, detector, cfg["seed"], cfg["bins"], cfg["trials"], cfg["M"], cfg["N"])
        summary = {
            "means": hist.means.tolist(),
            "std_errors": hist.std_errors.tolist(),
            "fraction_above_one": hist.fraction_above().tolist(),
            "bin_edges": hist.bin_edges.tolist(),
            "histogram": hist.counts.tolist(),
        }
        return Document("ensemble", cfg, summary, ["unitary", "mode", "nbar"], [list(r) for r in hist.rows()])
    stats, dist = ensemble_delta_n(
        cfg["K"], model, cfg["mode"], None, detector, cfg["trials"], cfg["seed"], cfg["M"], cfg["N"]
    )
    columns, rows = delta_n_table(dist)
    return Document("ensemble", cfg, {**delta_n_summary(dist), "K": stats.K}, columns, rows)


def cmd_temperature(cfg: dict) -> Document:
    energy = photon_energy(cfg["wavelength_nm"])
    if (cfg["density"] is None) == (cfg["fit"] is None):
        raise UsageError("give exactly one of --density or --fit")
    if cfg["density"] is not None:
        rep = effective_temperature(cfg["density"], energy)
        summary = {"photon_density": rep.photon_density, "temperature_K": rep.temperature, "photon_energy_J": energy}
        return Document("temperature", cfg, summary, [], [])
    try:
        raw = json.loads(Path(cfg["fit"]).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {cfg['fit']}: {exc}") from exc
    observed = {int(k): float(v) for k, v in raw.items()} if isinstance(raw, dict) else dict(enumerate(raw))
    rep = fit_temperature(observed, energy)
    fam = fit_family(rep.n_photons, rep.n_modes)
    rows = [[n, observed.get(n, 0.0), fam.get(n, 0.0)] for n in sorted(set(observed) | set(fam))]
    summary = {
        "photon_density": rep.photon_density,
        "temperature_K": rep.temperature,
        "photon_energy_J": energy,
        "n_photons": rep.n_photons,
        "n_modes": rep.n_modes,
        "tv_distance": rep.tv_distance,
    }
    return Document("temperature", cfg, summary, ["n", "observed", "fit"], rows)


# -- figures ----------------------------------------------------------------------------------


def _figure_equilibration(cfg: dict, stage: int) -> Document:
    sub = {**cfg, "unitaries": str(cfg["K"])}
    rows, summary = _equilibration_rows(sub, _model(cfg["statistics"]))
    cols = [0, 1, 3, 4] if stage == 1 else [0, 2, 5, 6]
    out = [[r[i] for i in cols] for r in rows]
    return Document("figure", cfg, summary, ["n", "analytic", "ensemble_mean", "ensemble_se"], out)


def _figure_delta_n(cfg: dict, active: bool) -> Document:
    config = ModeConfiguration.canonical(4)
    mode = "active" if active else "passive"
    analytic = {s: delta_n_distribution(haar_average(4, 3, s), config, active) for s in ("indist", "dist")}
    sampled = {s: ensemble_delta_n(cfg["K"], s, mode, config, seed=cfg["seed"]) for s in ("indist", "dist")}
    rows = []
    for dn in range(-3, 4):
        rows.append([
            dn,
            float(analytic["indist"][dn]),
            float(analytic["dist"][dn]),
            float(sampled["indist"][1][dn]),
            float(sampled["dist"][1][dn]),
        ])
    summary = {}
    for s in ("indist", "dist"):
        summary[f"{s}_analytic_mean"] = float(analytic[s].mean)
        summary[f"{s}_ensemble_mean"] = sampled[s][0].mean
        summary[f"{s}_ensemble_se"] = sampled[s][0].std_error
    columns = ["dn", "indist_analytic", "dist_analytic", "indist_ensemble", "dist_ensemble"]
    return Document("figure", cfg, summary, columns, rows)


def _figure_temperatures(cfg: dict) -> Document:
    config = ModeConfiguration.canonical(4)
    rows = []
    for s in ("indist", "dist"):
        avg = haar_average(4, 3, s)
        stack = ensemble_distributions(cfg["K"], s, cfg["seed"])
        pooled = OutcomeDistribution(4, 3, dict(zip(stack.outcomes, map(float, stack.probs.mean(axis=0)))))
        for stage, active in (("initial", False), ("final", True)):
            ta, tb = subset_temperatures(avg, config, active=active)
            ea, eb = subset_temperatures(pooled, config, active=active)
            rows.append([s, stage, "A", ta.photon_density, ta.temperature, ea.photon_density, ea.temperature])
            rows.append([s, stage, "B", tb.photon_density, tb.temperature, eb.photon_density, eb.temperature])
    columns = ["statistics", "stage", "subset", "density_analytic", "T_analytic", "density_ensemble", "T_ensemble"]
    return Document("figure", cfg, {"K": cfg["K"]}, columns, rows)


def _figure_flux(cfg: dict) -> Document:
    detector = _detector(cfg["detector"], 4)
    hist = mode_flux_histogram(cfg["K"], _model(cfg["statistics"]), detector, cfg["seed"])
    rows = []
    for b in range(hist.counts.shape[1]):
        rows.append([float(hist.bin_edges[b]), float(hist.bin_edges[b + 1]), *map(int, hist.counts[:, b])])
    summary = {
        "means": hist.means.tolist(),
        "std_errors": hist.std_errors.tolist(),
        "fraction_above_one": hist.fraction_above().tolist(),
    }
    return Document("figure", cfg, summary, ["bin_lo", "bin_hi", "mode0", "mode1", "mode2", "mode3"], rows)


def _figure_sweep(cfg: dict) -> Document:
    analytic = {s: configuration_sweep(haar_average(4, 3, s), True) for s in ("indist", "dist")}
    sampled = {s: configuration_sweep(ensemble_distributions(cfg["K"], s, cfg["seed"]), True) for s in ("indist", "dist")}
    rows = [
        [c.label, analytic["indist"][c], analytic["dist"][c], sampled["indist"][c], sampled["dist"][c]]
        for c in all_configurations(4)
    ]
    summary = {
        "ensemble_indist_min": min(sampled["indist"].values()),
        "ensemble_dist_max": max(sampled["dist"].values()),
    }
    columns = ["configuration", "indist_analytic", "dist_analytic", "indist_ensemble", "dist_ensemble"]
    return Document("figure", cfg, summary, columns, rows)


def cmd_figure(cfg: dict) -> Document:
    which = cfg["which"]
    if which not in FIGURES:
        raise UsageError(f"figure must be one of {', '.join(FIGURES)}, got {which!r}")
    if cfg["K"] < 2:
        raise UsageError("--K must be at least 2")
    builders: dict[str, Callable[[dict], Document]] = {
        "fig2a": lambda c: _figure_equilibration(c, 1),
        "fig2b": lambda c: _figure_equilibration(c, 2),
        "fig3a": lambda c: _figure_delta_n(c, False),
        "fig3b": lambda c: _figure_delta_n(c, True),
        "fig3c": _figure_temperatures,
        "sm_flux": _figure_flux,
        "sm_sweep": _figure_sweep,
    }
    return builders[which](cfg)


COMMANDS: dict[str, Callable[[dict], Document]] = {
    "haar-gen": cmd_haar_gen,
    "weingarten": cmd_weingarten,
    "outcome-probs": cmd_outcome_probs,
    "haar-average": cmd_haar_average,
    "demon run": cmd_demon_run,
    "demon sweep": cmd_demon_sweep,
    "demon randomize": cmd_demon_randomize,
    "equilibrate": cmd_equilibrate,
    "ensemble": cmd_ensemble,
    "temperature": cmd_temperature,
    "figure": cmd_figure,
}


def run(cfg: dict, key: str) -> Document:
    return COMMANDS[key](cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    key = command_key(args)
    try:
        cfg = resolve_config(args)
        doc = run(cfg, key)
        text = write_document(doc, cfg["output"], cfg["format"])
    except NumericalConsistencyError as exc:
        print(f"photonic-demon: numerical consistency failure: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, KeyError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"photonic-demon: error: {exc}", file=sys.stderr)
        return 2
    if cfg["output"] is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
