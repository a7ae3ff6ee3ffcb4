"""Command-line front-end: ``qmeas run <scenario>`` and ``qmeas sweep <scenario>``.

Each scenario has a typed parameter schema (its defaults). Parameters come
from a JSON config ``{"scenario", "parameters", "numerics", "seed"}``,
``--param key=value`` options, or ``--key [value]`` shorthands, in that order
of precedence (later wins). Unknown keys are rejected.

Outputs are ``results.csv`` (``quantity,value`` for ``run``; one row per
value for ``sweep``), optional extra tables, and ``manifest.json``.
Exit codes: 0 success, 2 invalid input, 3 numerical-contract violation.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .ancilla import (
    MeterModel,
    build_from_markers,
    extended_measurement_operators,
    measurement_operators,
    premeasure,
    readout,
    reduced_meter_state,
)
from .meters import GaussianPointer, QubitMeter, pointer_moments, von_neumann_premeasurement
from .projective import abl_probability, joint_then_post_probability, luders_conditional, \
    outcome_probability
from .qcore import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    NumericalContractError,
    Numerics,
    density,
    expectation,
    matexp_hermitian,
    maxabs,
    purity,
    random_ket,
    random_unitary,
)
from .scenarios import dynamics, lgi, spin, threebox, twoslit, wavefunction
from .weakpost import (
    WeakSetup,
    amplification_scan,
    marker_overlap_exact,
    marker_overlap_weak,
    meter_observable_weak,
    postselect_meter_2nd,
    weak_system_update,
    weak_system_update_exact,
)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


class ConfigError(ValueError):
    """Invalid configuration or command line."""


@dataclass
class Outcome:
    summary: dict
    tables: dict = field(default_factory=dict)   # file name -> (header, rows)


def _qubit(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _pauli(name: str) -> np.ndarray:
    if name not in PAULI:
        raise ConfigError(f"observable must be one of {sorted(PAULI)}, got {name!r}")
    return PAULI[name]


def _matrix_entries(prefix: str, m: np.ndarray) -> dict:
    out = {}
    for (i, j), v in np.ndenumerate(m):
        out[f"{prefix}{i}{j}_re"] = float(v.real)
        out[f"{prefix}{i}{j}_im"] = float(v.imag)
    return out


# ------------------------------------------------------------------ scenarios


def run_luders(p, rng, numerics):
    obs = _pauli(p["observable"])
    rho = density(_qubit(p["theta"], p["phi"]))
    dist = outcome_probability(obs, rho)
    post, prob = luders_conditional(obs, rho, p["outcome"], numerics)
    out = {"prob_minus": dist.probability(-1.0), "prob_plus": dist.probability(1.0),
           "mean": dist.mean(), "expectation": float(np.real(expectation(obs, rho))),
           "prob_outcome": prob, "post_purity": purity(post)}
    out.update(_matrix_entries("post_", post))
    return Outcome(out)


def run_abl(p, rng, numerics):
    f = threebox.post_state(p["theta"])
    out = {}
    for box in threebox.BOXES:
        proj = threebox.box_projector(box)
        out[f"ABL_{box}"] = abl_probability(threebox.PRE_STATE, proj, f, numerics).probability(1.0)
        out[f"joint_post_{box}"] = joint_then_post_probability(threebox.PRE_STATE, proj, f)
    out["overlap_sq"] = float(abs(np.vdot(f, threebox.PRE_STATE)) ** 2)
    return Outcome(out)


def run_ancilla(p, rng, numerics):
    d_s, d_m, trials = p["system_dim"], p["meter_dim"], p["trials"]
    worst_pm, worst_ext, worst_image = 0.0, 0.0, 0.0
    for _ in range(trials):
        basis = random_unitary(d_s, rng)
        meter = MeterModel(random_ket(d_m, rng), random_unitary(d_m, rng))
        markers = [random_ket(d_m, rng) for _ in range(d_s)]
        pm = build_from_markers(d_s, meter, markers, basis=basis, completion_seed=int(rng.integers(2**31)))
        worst_pm = max(worst_pm, measurement_operators(pm).completeness_error())
        u = pm.unitary
        for i in range(d_s):
            v = np.kron(basis[:, i], meter.initial)
            worst_image = max(worst_image, maxabs(u @ v - np.kron(basis[:, i], markers[i])))
        d_d = p["environment_dim"]
        dims = (d_s, d_d, d_m)
        _, eff = extended_measurement_operators(random_unitary(d_s * d_d * d_m, rng),
                                                random_ket(d_d, rng), random_ket(d_m, rng), dims)
        worst_ext = max(worst_ext, eff.completeness_error())
    qm = QubitMeter(p["qubit_theta"])
    ops = measurement_operators(qm.premeasurement())
    c, s = np.cos(p["qubit_theta"] / 2), np.sin(p["qubit_theta"] / 2)
    out = {"max_completeness_error": worst_pm, "max_extended_completeness_error": worst_ext,
           "max_marker_image_error": worst_image,
           "qubit_omega_error": max(maxabs(ops[0] - np.diag([c, s])), maxabs(ops[1] - np.diag([s, c]))),
           "qubit_effect_error": maxabs(ops.effects().effects[0] - np.diag([c * c, s * s]))}
    # strong limit: pointer read-out reproduces the projective rule
    rho = density(_qubit(p["theta"], p["phi"]))
    strong = QubitMeter(0.0).premeasurement()
    tau = premeasure(strong, rho)
    errs = []
    for k, value in enumerate((1.0, -1.0)):
        state, prob = readout(strong, tau, k)
        ref_state, ref_prob = luders_conditional(SIGMA_Z, rho, value)
        errs += [abs(prob - ref_prob), maxabs(state - ref_state)]
    out["strong_limit_error"] = max(errs)
    return Outcome(out)


def _vn_meter(p, smax=1.0):
    return GaussianPointer.default(p["width"], p["g"], smax, p["grid_points"])


def run_von_neumann(p, rng, numerics):
    obs = _pauli(p["observable"])
    rho = density(_qubit(p["theta"], p["phi"]))
    meter = _vn_meter(p)
    pm = von_neumann_premeasurement(meter, obs, p["method"])
    mom = pointer_moments(meter, reduced_meter_state(pm, rho))
    m0 = pointer_moments(meter, meter.phi0)
    mean_s = float(np.real(expectation(obs, rho)))
    var_s = 1.0 - mean_s**2
    out = {"Q_mean": mom.q, "g_S_mean": p["g"] * mean_s,
           "Q_var": mom.q_var, "Q0_var_plus_g2_S_var": m0.q_var + p["g"] ** 2 * var_s,
           "P_mean": mom.p, "P_var": mom.p_var, "Q0_var": m0.q_var, "P0_var": m0.p_var}
    out["mean_error"] = abs(out["Q_mean"] - out["g_S_mean"])
    out["var_error"] = abs(out["Q_var"] - out["Q0_var_plus_g2_S_var"])
    return Outcome(out)


def run_amplify(p, rng, numerics):
    meter = _vn_meter(p)
    alpha = np.cos(p["pre_theta"] / 2)
    beta = np.exp(1j * p["pre_phi"]) * np.sin(p["pre_theta"] / 2)
    r = amplification_scan(meter, alpha, beta, n_random=p["n_random"], rng=rng)
    f = r.argmax_post
    return Outcome({
        "max_abs_fQ": r.max_abs_fQ, "bound": r.bound, "bound_gap": r.bound - r.max_abs_fQ,
        "overlap_r": r.overlap_r, "prob_at_max": r.prob_at_max, "prob_formula": r.prob_formula,
        "var_at_max": r.var_at_max, "initial_var": r.initial_var,
        "random_max_abs_fQ": r.random_max_abs_fQ,
        "post_0_re": float(f[0].real), "post_0_im": float(f[0].imag),
        "post_1_re": float(f[1].real), "post_1_im": float(f[1].imag),
    })


def run_weak_sweep(p, rng, numerics):
    obs = _pauli(p["observable"])
    s = _qubit(p["pre_theta"], p["pre_phi"])
    f = _qubit(p["post_theta"], p["post_phi"])
    setup = WeakSetup(s, obs, f, _vn_meter(p))
    sigma = density(s)
    rep = postselect_meter_2nd(setup)
    n_est = meter_observable_weak(setup, setup.meter.momentum_operator)
    pairs = {
        "system_update": (weak_system_update_exact(setup, sigma), weak_system_update(setup, sigma)),
        "marker_overlap": (marker_overlap_exact(setup, 1, -1), marker_overlap_weak(setup, 1, -1)),
        "prob": (rep.prob_post_exact, rep.prob_post_2nd),
        "fQ": (rep.exact_Q, rep.pointer_Q),
        "fP": (rep.exact_P, rep.pointer_P),
        "N": (n_est.exact, n_est.leading),
    }
    out = {"weak_value_re": rep.weak_value.real, "weak_value_im": rep.weak_value.imag,
           "denominator": rep.denominator}
    for name, (exact, formula) in pairs.items():
        if np.ndim(exact):
            out[f"{name}_delta"] = maxabs(np.asarray(exact) - formula)
        else:
            out[f"{name}_exact"] = float(exact)
            out[f"{name}_formula"] = float(formula)
            out[f"{name}_delta"] = abs(float(exact) - float(formula))
    return Outcome(out)


def run_lgi(p, rng, numerics):
    rep = lgi.lgi_qubit_report(p["beta"], p["phi"])
    out = {"B_mean": rep.B_mean, "mean": rep.mean, "overlap_sq": rep.overlap_sq,
           "re_weak_value": rep.re_weak_value, "violated": rep.violated}
    if p["search"]:
        res = lgi.lgi_search(p["n_beta"], p["n_phi"])
        out["max_B"] = res.max_B
        out["min_B_grid"] = res.min_B
        out["violated_max"] = res.max_B > lgi.UPPER_BOUND
        for k, o in enumerate(res.optima):
            out[f"optimum_{k}_beta"] = o.beta
            out[f"optimum_{k}_phi"] = o.phi
            out[f"optimum_{k}_cos_phi"] = float(np.cos(o.phi))
    return Outcome(out)


def run_three_box(p, rng, numerics):
    theta = threebox.CANONICAL_THETA if p["theta"] is None else p["theta"]
    rep = threebox.three_box(theta, p["g"], p["width"], p["grid_points"])
    out = {"theta": rep.theta}
    for box in threebox.BOXES:
        out[f"ABL_{box}"] = rep.abl[box]
    for box in threebox.BOXES:
        out[f"weak_{box}"] = float(rep.weak[box].real)
    out["weak_sum"] = float(rep.weak_sum.real)
    out["weak_C_closed_form"] = rep.weak_C_closed_form
    out["pointer_P_over_g"] = rep.pointer_P_over_g
    return Outcome(out)


def run_spin_target(p, rng, numerics):
    s = _qubit(p["pre_theta"], p["pre_phi"])
    res = spin.spin_target(s, p["target"], p["width"], p["g"], p["grid_points"])
    f = res.post
    return Outcome({
        "weak_value_re": res.weak_value.real, "weak_value_im": res.weak_value.imag,
        "coupling": res.coupling, "fQ_over_g": res.fQ_over_g,
        "relative_pointer_error": abs(res.fQ_over_g - p["target"]) / abs(p["target"]),
        "prob_post": res.prob_post, "breakdown_halfwidth": res.breakdown_halfwidth,
        "post_0_re": float(f[0].real), "post_0_im": float(f[0].imag),
        "post_1_re": float(f[1].real), "post_1_im": float(f[1].imag),
    })


def run_wavefn(p, rng, numerics):
    psi = random_ket(p["dim"], rng)
    exact = wavefunction.reconstruct_wavefunction(psi)
    out = {"fidelity_exact": exact.fidelity}
    rec = exact
    if p["g"] > 0:
        rec = wavefunction.reconstruct_wavefunction(psi, p["g"])
        out["fidelity_pointer"] = rec.fidelity
    target = wavefunction.fix_global_phase(psi)
    rows = [(x, target[x].real, target[x].imag, rec.amplitudes[x].real, rec.amplitudes[x].imag)
            for x in range(psi.size)]
    return Outcome(out, {"amplitudes.csv": (("x", "psi_re", "psi_im", "rec_re", "rec_im"), rows)})


def run_two_slit(p, rng, numerics):
    geo = twoslit.SlitGeometry(p["separation"], p["width"], p["grid_points"], p["half_range"],
                               p["z_final"], p["z_steps"], p["two_slits"])
    ts = twoslit.two_slit_trajectories(geo, p["n_traj"])
    out = {"density_correlation": twoslit.density_correlation(ts),
           "fringes": twoslit.count_fringes(ts),
           "min_gap": float(np.min(np.diff(ts.x, axis=1))),
           "x_final_min": float(ts.x[-1].min()), "x_final_max": float(ts.x[-1].max())}
    return Outcome(out, {"trajectories.csv": (("trajectory", "z", "x"), list(ts.rows()))})


def run_zeno(p, rng, numerics):
    obs = _pauli(p["observable"])
    rho = density(_qubit(p["theta"], p["phi"]))
    (row,) = dynamics.zeno_sweep(obs, rho, [p["n"]], p["gamma"], p["duration"],
                                 p["width"], p["grid_points"])
    return Outcome({"n": row.n, "deviation": row.deviation, "closed_form": row.closed_form})


def run_lindblad(p, rng, numerics):
    h = 0.5 * p["omega"] * SIGMA_X
    model = dynamics.LindbladModel(h, ((_pauli(p["observable"]), p["eta"]),))
    rho = density(_qubit(p["theta"], p["phi"]))
    final = dynamics.lindblad_integrate(model, rho, p["t"], p["dt"])
    out = {"trace": float(np.real(np.trace(final))), "purity": purity(final)}
    out.update(_matrix_entries("rho_", final))
    if p["eta"] == 0:
        u = matexp_hermitian(h, p["t"])
        out["unitary_error"] = maxabs(final - u @ rho @ u.conj().T)
    if p["omega"] == 0 and p["observable"] == "z":
        out["dephasing_error"] = maxabs(final - dynamics.dephasing_closed_form(rho, p["eta"], p["t"]))
    if p["n_repeated"] > 0:
        (row,) = dynamics.lindblad_from_repeated(model, rho, p["t"], [p["n_repeated"]], p["dt"])
        out["repeated_error"] = row.error
        out["repeated_max_trace_error"] = row.max_trace_error
    return Outcome(out)


@dataclass(frozen=True)
class Scenario:
    run: Callable
    defaults: dict
    types: dict = field(default_factory=dict)   # explicit types for None defaults


_VN = {"g": 0.1, "width": 1.0, "grid_points": 1024}

SCENARIOS: dict[str, Scenario] = {
    "luders": Scenario(run_luders, {"theta": 1.0, "phi": 0.0, "observable": "z", "outcome": 1.0}),
    "abl": Scenario(run_abl, {"theta": threebox.CANONICAL_THETA}),
    "ancilla": Scenario(run_ancilla, {"system_dim": 3, "meter_dim": 4, "environment_dim": 2,
                                      "trials": 100, "qubit_theta": 0.7, "theta": 1.0,
                                      "phi": 0.3}),
    "von-neumann": Scenario(run_von_neumann, {**_VN, "theta": 1.0, "phi": 0.3, "observable": "z",
                                              "method": "markers"}),
    "amplify": Scenario(run_amplify, {**_VN, "g": 0.5, "pre_theta": 1.2, "pre_phi": 0.4,
                                      "n_random": 10_000}),
    "weak-sweep": Scenario(run_weak_sweep, {**_VN, "observable": "z", "pre_theta": 0.6,
                                            "pre_phi": 0.7, "post_theta": 2.2, "post_phi": -0.4}),
    "lgi": Scenario(run_lgi, {"beta": -1.0 / 6.0, "phi": float(np.arccos(1.0 / 6.0)),
                              "search": False, "n_beta": 400, "n_phi": 400}),
    "three-box": Scenario(run_three_box, {"theta": None, "g": 0.01, "width": 1.0,
                                          "grid_points": 1024}, {"theta": float}),
    "spin-target": Scenario(run_spin_target, {"pre_theta": 0.8, "pre_phi": 0.0, "target": 100.0,
                                              "width": 1.0, "g": None, "grid_points": 1024},
                            {"g": float}),
    "wavefn": Scenario(run_wavefn, {"dim": 8, "g": 1e-3}),
    "two-slit": Scenario(run_two_slit, {**{k: getattr(twoslit.SlitGeometry, k) for k in
                                           ("separation", "width", "half_range", "z_final",
                                            "z_steps", "two_slits")},
                                        "grid_points": twoslit.SlitGeometry.n, "n_traj": 400}),
    "zeno": Scenario(run_zeno, {"n": 1024, "gamma": 1.0, "duration": 1.0, "width": 0.5,
                                "grid_points": 1024, "observable": "z", "theta": float(np.pi / 2),
                                "phi": 0.0}),
    "lindblad": Scenario(run_lindblad, {"eta": 0.5, "omega": 0.0, "observable": "z", "t": 1.0,
                                        "dt": 1e-3, "theta": float(np.pi / 2), "phi": 0.0,
                                        "n_repeated": 0}),
}


# --------------------------------------------------------------- config I/O


def _param_type(sc: Scenario, key: str):
    if key in sc.types:
        return sc.types[key]
    return type(sc.defaults[key])


def _coerce(sc: Scenario, key: str, value, from_text: bool):
    if key not in sc.defaults:
        raise ConfigError(f"unknown parameter {key!r}; known: {sorted(sc.defaults)}")
    kind = _param_type(sc, key)
    if from_text:
        text = str(value).strip()
        if text.lower() in ("none", "null") and sc.defaults[key] is None:
            return None
        if kind is bool:
            if text.lower() in ("true", "1", "yes"):
                return True
            if text.lower() in ("false", "0", "no"):
                return False
            raise ConfigError(f"parameter {key!r} expects a boolean, got {text!r}")
        try:
            if kind is int:
                return _as_int(key, float(text))
            return float(text) if kind is float else text
        except ValueError as exc:
            raise ConfigError(f"parameter {key!r} expects {kind.__name__}, got {text!r}") from exc
    if value is None and sc.defaults[key] is None:
        return None
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"parameter {key!r} expects a boolean")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"parameter {key!r} expects an integer")
        return _as_int(key, value)
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"parameter {key!r} expects a number")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"parameter {key!r} expects a string")
    return value


def _as_int(key, value) -> int:
    if float(value) != int(value):
        raise ConfigError(f"parameter {key!r} expects an integer, got {value!r}")
    return int(value)


_CONFIG_KEYS = {"scenario", "parameters", "numerics", "seed"}


def load_config(path: str | None, scenario: str) -> tuple[dict, dict, int | None]:
    """Read a JSON config; returns ``(parameters, numerics, seed)``."""
    if path is None:
        return {}, {}, None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(data) - _CONFIG_KEYS
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    if "scenario" in data and data["scenario"] != scenario:
        raise ConfigError(f"config is for scenario {data['scenario']!r}, not {scenario!r}")
    params = data.get("parameters", {})
    numerics = data.get("numerics", {})
    if not isinstance(params, dict) or not isinstance(numerics, dict):
        raise ConfigError("'parameters' and 'numerics' must be objects")
    seed = data.get("seed")
    return params, numerics, seed


def build_numerics(overrides: dict) -> Numerics:
    names = {f.name for f in dataclasses.fields(Numerics)}
    bad = set(overrides) - names
    if bad:
        raise ConfigError(f"unknown numerics keys {sorted(bad)}; known: {sorted(names)}")
    for k, v in overrides.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0:
            raise ConfigError(f"numerics {k!r} must be a non-negative number")
    return dataclasses.replace(Numerics(), **{k: float(v) for k, v in overrides.items()})


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return seed


def resolve_parameters(scenario: str, file_params: dict, cli_params: list[tuple[str, str]]) -> dict:
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    sc = SCENARIOS[scenario]
    params = dict(sc.defaults)
    for k, v in file_params.items():
        params[k] = _coerce(sc, k, v, from_text=False)
    for k, v in cli_params:
        params[k] = _coerce(sc, k, v, from_text=True)
    return params


# ------------------------------------------------------------------ output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")   # + 0.0 folds -0 into 0
    if v is None:
        return ""
    return str(v)


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_manifest(out: Path, manifest: dict):
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")


def execute(scenario: str, params: dict, numerics: Numerics, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    return SCENARIOS[scenario].run(params, rng, numerics)


def _json_params(params: dict) -> dict:
    return {k: (float(v) if isinstance(v, np.floating) else v) for k, v in params.items()}


def cmd_run(scenario, params, numerics, numerics_raw, seed, out: Path) -> int:
    res = execute(scenario, params, numerics, seed)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "results.csv", ("quantity", "value"), list(res.summary.items()))
    files = ["results.csv"]
    for name, (header, rows) in res.tables.items():
        _write_csv(out / name, header, rows)
        files.append(name)
    _write_manifest(out, {"command": "run", "scenario": scenario, "parameters": _json_params(params),
                          "numerics": numerics_raw, "seed": seed, "version": __version__,
                          "outputs": files})
    return 0


def cmd_sweep(scenario, params, numerics, numerics_raw, seed, out: Path, vary: str,
              values: list[str]) -> int:
    sc = SCENARIOS[scenario]
    if vary not in sc.defaults:
        raise ConfigError(f"cannot vary {vary!r}: not a parameter of {scenario!r}")
    points = [_coerce(sc, vary, v, from_text=True) for v in values]
    if not points:
        raise ConfigError("--values is empty")
    summaries = []
    for v in points:
        summaries.append(execute(scenario, {**params, vary: v}, numerics, seed).summary)
    columns = []
    for s in summaries:
        columns += [k for k in s if k not in columns and k != vary]
    rows = [[v] + [s.get(k) for k in columns] for v, s in zip(points, summaries)]
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "results.csv", [vary] + columns, rows)
    _write_manifest(out, {"command": "sweep", "scenario": scenario, "parameters": _json_params(params),
                          "vary": vary, "values": points, "numerics": numerics_raw, "seed": seed,
                          "version": __version__, "outputs": ["results.csv"]})
    return 0


# -------------------------------------------------------------------- main


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qmeas", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("run", "sweep"):
        s = sub.add_parser(name)
        s.add_argument("scenario", choices=sorted(SCENARIOS))
        s.add_argument("--config")
        s.add_argument("--out", default="qmeas-out")
        s.add_argument("--seed", type=int)
        s.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
        if name == "sweep":
            s.add_argument("--vary", required=True)
            s.add_argument("--values", required=True, help="comma-separated values")
    return p


def _shorthands(scenario: str, extra: list[str]) -> list[tuple[str, str]]:
    """``--key value`` / ``--key`` (booleans) options naming scenario parameters."""
    sc = SCENARIOS[scenario]
    pairs, i = [], 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:].replace("-", "_")
        if "=" in key:
            key, val = key.split("=", 1)
            pairs.append((key, val))
            i += 1
            continue
        if key not in sc.defaults:
            raise ConfigError(f"unknown option {tok!r} for scenario {scenario!r}")
        nxt = extra[i + 1] if i + 1 < len(extra) else None
        if _param_type(sc, key) is bool and (nxt is None or nxt.startswith("--")):
            pairs.append((key, "true"))
            i += 1
        elif nxt is None:
            raise ConfigError(f"option {tok!r} needs a value")
        else:
            pairs.append((key, nxt))
            i += 2
    return pairs


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args, extra = _parser().parse_known_args(argv)
        file_params, numerics_raw, file_seed = load_config(args.config, args.scenario)
        cli_pairs = []
        for item in args.param:
            if "=" not in item:
                raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            cli_pairs.append((k.strip(), v))
        cli_pairs += _shorthands(args.scenario, extra)
        params = resolve_parameters(args.scenario, file_params, cli_pairs)
        numerics = build_numerics(numerics_raw)
        seed = _check_seed(args.seed if args.seed is not None else
                           (file_seed if file_seed is not None else 0))
        out = Path(args.out)
        if args.command == "run":
            return cmd_run(args.scenario, params, numerics, numerics_raw, seed, out)
        values = [v for v in args.values.split(",") if v.strip()]
        return cmd_sweep(args.scenario, params, numerics, numerics_raw, seed, out, args.vary, values)
    except NumericalContractError as exc:
        print(f"qmeas: numerical contract violated: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"qmeas: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
