"""Command-line front end.

Commands
    evolve        covariance/purity trajectory of a Gaussian state
    purity-curve  purity-only trajectory
    eof-curve     entanglement of formation vs time for the two-mode amplifier
    eof-map       settled entanglement over the (eta1/Gamma, nbar0) plane
    pipeline      concatenated evolution stages (amplify / damp / dephase)
    oracle-check  closed forms vs the truncated Fock integrator, JSON report

Configuration is a JSON document (--config), with the common knobs
overridable by flags.  Complex numbers are written as [re, im] pairs or
strings like "0.3+0.1j".  Exit codes: 0 ok, 2 bad configuration,
3 tolerance exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import charfunc as cf
from . import fock
from . import metrics
from .errors import CutoffTooSmallError, OverAmplificationError
from .evolution import evolve_gaussian
from .states import (
    GaussianState,
    SystemParams,
    make_coherent,
    make_squeezed,
    make_thermal,
    make_two_mode_squeezed_thermal,
    vacuum,
)


class ConfigError(ValueError):
    pass


class ToleranceFailure(RuntimeError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _write_csv(stream, header: list[str], rows) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _emit(cfg: dict, header: list[str], rows, json_payload=None) -> None:
    out = cfg.get("output", {})
    fmt = out.get("format", "csv")
    path = out.get("path", "-")
    if fmt == "json":
        payload = json_payload
        if payload is None:
            payload = {"header": header, "rows": [[_fmt(v) for v in row] for row in rows]}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        if path == "-":
            sys.stdout.write(text)
        else:
            with open(path, "w") as fh:
                fh.write(text)
        return
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    if path == "-":
        _write_csv(sys.stdout, header, rows)
    else:
        with open(path, "w") as fh:
            _write_csv(fh, header, rows)


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError("complex entries must be [re, im] pairs")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def parse_params(block: dict) -> SystemParams:
    try:
        s = int(block.get("s", len(block.get("gamma_amp", [1]))))
        eta_raw = block.get("eta", 0.0)
        if isinstance(eta_raw, (int, float, str)) or (
            isinstance(eta_raw, (list, tuple)) and len(eta_raw) == 2 and np.isscalar(eta_raw[0])
        ):
            if s != 1:
                raise ConfigError("scalar eta is only valid for one mode")
            eta = np.array([[_as_complex(eta_raw)]])
        else:
            eta = np.array([[_as_complex(v) for v in row] for row in eta_raw])

        def vec(key, default):
            raw = block.get(key, default)
            if np.isscalar(raw) or isinstance(raw, str):
                raw = [raw] * s
            return list(raw)

        return SystemParams(
            eta=eta,
            gamma_amp=[float(v) for v in vec("gamma_amp", 0.0)],
            nbar=[float(v) for v in vec("nbar", 0.0)],
            w=[_as_complex(v) for v in vec("w", 0.0)],
            gamma_phase=[float(v) for v in vec("gamma_phase", 0.0)],
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad params block: {exc}") from exc


def parse_initial(block: dict, s: int) -> GaussianState:
    family = block.get("family", "vacuum")
    try:
        if family == "vacuum":
            return vacuum(s)
        if family == "coherent":
            m0 = block.get("m0", 0.0)
            if np.isscalar(m0) or isinstance(m0, str) or (
                isinstance(m0, (list, tuple)) and len(m0) == 2 and np.isscalar(m0[0]) and s == 1
            ):
                m0 = [m0] * s
            return make_coherent([_as_complex(v) for v in m0])
        if family == "squeezed":
            if s != 1:
                raise ConfigError("squeezed initial state is one mode")
            return make_squeezed(float(block.get("r", 0.0)), float(block.get("phi", 0.0)))
        if family == "thermal":
            if s != 1:
                raise ConfigError("thermal initial state is one mode")
            return make_thermal(float(block.get("N", 0.0)))
        if family == "two_mode_squeezed_thermal":
            if s != 2:
                raise ConfigError("two_mode_squeezed_thermal needs two modes")
            return make_two_mode_squeezed_thermal(
                float(block.get("N", 0.0)), float(block.get("r", 0.0))
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad initial state: {exc}") from exc
    raise ConfigError(f"unknown state family {family!r}")


def parse_times(block) -> np.ndarray:
    if block is None:
        raise ConfigError("missing times")
    if isinstance(block, dict):
        num = int(block.get("num", 0))
        if num < 1:
            raise ConfigError("times.num must be >= 1")
        return np.linspace(float(block.get("start", 0.0)), float(block["stop"]), num)
    arr = np.asarray(list(block), dtype=float)
    if arr.size == 0:
        raise ConfigError("times list must be nonempty")
    return arr


def _sweep_values(block: dict) -> np.ndarray:
    steps = int(block.get("steps", 0))
    if steps < 1:
        raise ConfigError("sweep.steps must be >= 1")
    if steps == 1:
        return np.array([float(block["min"])])
    return np.linspace(float(block["min"]), float(block["max"]), steps)


def _cm_header(s: int) -> list[str]:
    cols = []
    for i in range(2 * s):
        for j in range(2 * s):
            cols += [f"cm_{i}{j}_re", f"cm_{i}{j}_im"]
    for j in range(s):
        cols += [f"m_{j}_re", f"m_{j}_im"]
    return cols


def cmd_evolve(cfg: dict, purity_only: bool = False) -> int:
    p = parse_params(cfg.get("params", {}))
    if p.gamma_phase.max() > 0:
        raise ConfigError("evolve covers Gaussian channels only; use the pipeline for dephasing")
    initial = parse_initial(cfg.get("initial", {}), p.s)
    times = parse_times(cfg.get("times"))
    rows = []
    for t in times:
        state = evolve_gaussian(initial, p, float(t))
        row = [t]
        if not purity_only:
            for i in range(2 * p.s):
                for j in range(2 * p.s):
                    row += [state.cm[i, j].real, state.cm[i, j].imag]
            for j in range(p.s):
                row += [state.m[j].real, state.m[j].imag]
        row.append(metrics.purity_general(state))
        rows.append(row)
    header = ["t"] + ([] if purity_only else _cm_header(p.s)) + ["purity"]
    _emit(cfg, header, rows)
    return 0


def _eof_params(cfg: dict) -> tuple[float, float]:
    block = cfg.get("params", {})
    return float(block.get("Gamma", 1.0)), float(block.get("nbar0", 0.0))


def cmd_eof_curve(cfg: dict) -> int:
    Gamma, nbar0 = _eof_params(cfg)
    sweep = cfg.get("sweep")
    if sweep is not None and sweep.get("name", "eta1") != "eta1":
        raise ConfigError("eof-curve sweeps eta1 only")
    if sweep is not None:
        etas = _sweep_values(sweep)
    else:
        etas = np.array([float(cfg.get("params", {}).get("eta1", 0.5))])
    times = parse_times(cfg.get("times", {"start": 0.0, "stop": 10.0, "num": 101}))
    init_block = cfg.get("initial", {"family": "vacuum"})
    rows = []
    for eta1 in etas:
        p = SystemParams.two_mode_drive(float(eta1), Gamma, nbar0)
        initial = parse_initial(init_block, 2)
        for t, res in zip(times, metrics.eof_time_curve(p, initial, times)):
            rows.append([eta1, t, res.z, res.value])
    _emit(cfg, ["eta1", "t", "z", "eof"], rows)
    return 0


def cmd_eof_map(cfg: dict) -> int:
    grid = cfg.get("grid", {})
    ratios = _sweep_values(grid.get("ratio", {"min": 0.0, "max": 1.0, "steps": 50}))
    noises = _sweep_values(grid.get("nbar0", {"min": 0.0, "max": 1.0, "steps": 50}))
    Gamma = float(cfg.get("params", {}).get("Gamma", 1.0))
    rows = []
    for ratio in ratios:
        for nbar0 in noises:
            p = SystemParams.two_mode_drive(ratio * Gamma, Gamma, nbar0)
            rows.append([ratio, nbar0, metrics.eof_saturation(p).value])
    _emit(cfg, ["eta1_over_gamma", "nbar0", "eof_inf"], rows)
    return 0


def _stage_kind(p: SystemParams) -> str:
    has_eta = np.abs(p.eta).max() > 0
    has_phase = p.gamma_phase.max() > 0
    if not has_phase:
        return "gaussian"
    if has_eta:
        raise ConfigError("a stage cannot mix drive with phase damping (unsolved channel)")
    if np.abs(p.w).max() > 0:
        raise ConfigError("a stage cannot mix bath squeezing with phase damping")
    return "dephasing"


def cmd_pipeline(cfg: dict) -> int:
    stages = cfg.get("stages", [])
    quad_order = int(cfg.get("quad_order", 64))
    first = parse_params(stages[0].get("params", {})) if stages else None
    s = first.s if first else int(cfg.get("s", 1))
    state: GaussianState | None = parse_initial(cfg.get("initial", {}), s)
    chi = cf.gaussian_charfunc(state)
    grid = cf.chi_grid(s=s, half_width=2.0, points=5 if s == 1 else 3)
    records = []
    for k, stage in enumerate(stages):
        p = parse_params(stage.get("params", {}))
        if p.s != s:
            raise ConfigError(f"stage {k} changes the mode count")
        t = float(stage.get("t", 0.0))
        kind = _stage_kind(p)
        if kind == "gaussian" and state is not None:
            state = evolve_gaussian(state, p, t)
            chi = cf.gaussian_charfunc(state)
        else:
            if kind == "gaussian":
                chi = cf.evolve_chi_general(chi, p, t)
            elif p.gamma_amp.max() > 0:
                chi = cf.evolve_chi_amp_phase(chi, p, t, quad_order)
            else:
                chi = cf.evolve_chi_phase_damping(chi, p, t, quad_order)
            state = None
        rec = {"stage": k, "t": t, "kind": kind, "gaussian": state is not None}
        if state is not None:
            rec["purity"] = metrics.purity_general(state)
        vals = chi(grid)
        rec["chi_grid"] = [[_fmt(v.real), _fmt(v.imag)] for v in np.atleast_1d(vals)]
        records.append(rec)
    payload: dict = {"stages": records}
    if state is not None:
        payload["final"] = {
            "m": [[_fmt(v.real), _fmt(v.imag)] for v in state.m],
            "cm": [[[_fmt(v.real), _fmt(v.imag)] for v in row] for row in state.cm],
            "purity": metrics.purity_general(state),
        }
    rows = [
        [r["stage"], r["t"], r["kind"], r["gaussian"], r.get("purity", float("nan"))]
        for r in records
    ]
    cfg.setdefault("output", {}).setdefault("format", "json")
    _emit(cfg, ["stage", "t", "kind", "gaussian", "purity"], rows, json_payload=payload)
    return 0


def _oracle_settings(cfg: dict) -> tuple[int, float, float]:
    block = cfg.get("oracle", {})
    return (
        int(block.get("cutoff", 30)),
        float(block.get("dt", 1e-3)),
        float(cfg.get("tol", 1e-4)),
    )


def _report(cfg: dict, payload: dict) -> None:
    out = cfg.get("output", {})
    path = out.get("path", "-")
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_oracle_check(cfg: dict) -> int:
    check = cfg.get("check", "chi-general")
    cutoff, dt, tol = _oracle_settings(cfg)
    params_block = cfg.get("params")
    if check in ("chi-general", "purity"):
        p = parse_params(params_block or {"s": 1, "eta": 0.3, "gamma_amp": [1.0], "nbar": [0.2]})
        initial = parse_initial(cfg.get("initial", {"family": "coherent", "m0": 0.5}), p.s)
        times = parse_times(cfg.get("times", [0.5, 1.0, 2.0]))
        grid = cf.chi_grid(s=p.s)
        rho = fock.gaussian_to_fock(initial, cutoff)
        max_chi = 0.0
        max_pur = 0.0
        trace_loss = 0.0
        for t in times:
            rho_t = fock.integrate(rho, p, float(t), dt)
            trace_loss = max(trace_loss, rho_t.trace_loss)
            state_t = evolve_gaussian(initial, p, float(t))
            if check == "chi-general":
                ana = cf.eval_gaussian_chi(state_t, grid)
                num = fock.chi_grid_from_rho(rho_t, grid)
                max_chi = max(max_chi, float(np.abs(ana - num).max()))
            else:
                max_pur = max(
                    max_pur,
                    abs(metrics.purity_general(state_t) - fock.purity_from_rho(rho_t)),
                )
        err = max_chi if check == "chi-general" else max_pur
    elif check == "phase":
        gamma = float((params_block or {}).get("gamma_phase", [0.5])[0]) if params_block else 0.5
        p = SystemParams.one_mode(gamma_phase=gamma)
        initial = parse_initial(cfg.get("initial", {"family": "coherent", "m0": 1.0}), 1)
        times = parse_times(cfg.get("times", [0.5, 1.0, 2.0]))
        grid = cf.chi_grid(s=1)
        rho0 = fock.gaussian_to_fock(initial, cutoff)
        chi0 = cf.gaussian_charfunc(initial)
        max_chi = 0.0
        trace_loss = 0.0
        for t in times:
            chi_t = cf.evolve_chi_phase_damping(chi0, p, float(t))
            n = np.arange(cutoff + 1)
            mask = np.exp(-0.5 * gamma * float(t) * (n[:, None] - n[None, :]) ** 2)
            rho_t = fock.FockDensity(rho=rho0.rho * mask, cutoff=cutoff, s=1)
            num = fock.chi_grid_from_rho(rho_t, grid)
            max_chi = max(max_chi, float(np.abs(chi_t(grid) - num).max()))
        err, max_pur = max_chi, 0.0
    elif check == "two-mode":
        p = parse_params(
            params_block
            or {
                "s": 2,
                "eta": [[0, 0.4], [0.4, 0]],
                "gamma_amp": [1.0, 1.0],
                "nbar": [0.2, 0.2],
            }
        )
        initial = parse_initial(cfg.get("initial", {"family": "vacuum"}), 2)
        t = float(parse_times(cfg.get("times", [1.0]))[-1])
        rho_t = fock.integrate(fock.gaussian_to_fock(initial, cutoff), p, t, dt)
        trace_loss = rho_t.trace_loss
        state_t = evolve_gaussian(initial, p, t)
        a1, a2 = fock.mode_operators(2, cutoff)
        A_num = np.zeros((2, 2), dtype=complex)
        B_num = np.zeros((2, 2), dtype=complex)
        ops = (a1, a2)
        for j in range(2):
            for k in range(2):
                A_num[j, k] = np.trace(rho_t.rho @ ops[j].conj().T @ ops[k]) + (
                    0.5 if j == k else 0.0
                )
                B_num[j, k] = np.trace(rho_t.rho @ ops[j] @ ops[k])
        A_ana, B_ana = state_t.blocks
        err = float(max(np.abs(A_num - A_ana).max(), np.abs(B_num - B_ana).max()))
        max_chi, max_pur = err, 0.0
    else:
        raise ConfigError(f"unknown oracle check {check!r}")

    payload = {
        "check": check,
        "params": cfg.get("params"),
        "cutoff": cutoff,
        "dt": dt,
        "trace_loss": trace_loss,
        "max_abs_chi_error": max_chi,
        "max_purity_error": max_pur,
        "tol": tol,
        "passed": bool(err <= tol),
    }
    _report(cfg, payload)
    if err > tol:
        raise ToleranceFailure(f"{check}: max error {err:.3e} exceeds tol {tol:.3e}")
    return 0


def _apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    if args.out is not None:
        cfg.setdefault("output", {})["path"] = args.out
    if args.format is not None:
        cfg.setdefault("output", {})["format"] = args.format
    if args.sweep is not None:
        parts = args.sweep.split(":")
        if len(parts) != 4:
            raise ConfigError("--sweep expects name:min:max:steps")
        cfg["sweep"] = {
            "name": parts[0],
            "min": float(parts[1]),
            "max": float(parts[2]),
            "steps": int(parts[3]),
        }
    if args.oracle_cutoff is not None:
        cfg.setdefault("oracle", {})["cutoff"] = args.oracle_cutoff
    if args.oracle_dt is not None:
        cfg.setdefault("oracle", {})["dt"] = args.oracle_dt
    if args.tol is not None:
        cfg["tol"] = args.tol
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optevo",
        description="Exact optical Gaussian evolution, entanglement analytics and oracle checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("evolve", "purity-curve", "eof-curve", "eof-map", "pipeline", "oracle-check"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON configuration file")
        cmd.add_argument("--out", help="output path ('-' for stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), help="output format")
        cmd.add_argument("--sweep", help="name:min:max:steps parameter sweep")
        cmd.add_argument("--oracle-cutoff", type=int, help="Fock cutoff per mode")
        cmd.add_argument("--oracle-dt", type=float, help="oracle integrator step")
        cmd.add_argument("--tol", type=float, help="tolerance for oracle checks")
        cmd.add_argument("--check", help="oracle check name (oracle-check only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg: dict = {}
        if args.config:
            with open(args.config) as fh:
                cfg = json.load(fh)
        cfg = _apply_overrides(cfg, args)
        if args.check and args.command == "oracle-check":
            cfg["check"] = args.check
        handlers = {
            "evolve": lambda c: cmd_evolve(c, purity_only=False),
            "purity-curve": lambda c: cmd_evolve(c, purity_only=True),
            "eof-curve": cmd_eof_curve,
            "eof-map": cmd_eof_map,
            "pipeline": cmd_pipeline,
            "oracle-check": cmd_oracle_check,
        }
        return handlers[args.command](cfg)
    except (ConfigError, OverAmplificationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ToleranceFailure, CutoffTooSmallError) as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
