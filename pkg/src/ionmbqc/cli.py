"""Command-line entry point tying the library into reproducible experiments.

Subcommands: verify, compile, gates, qec, bell, tomo.  Every run is fully
determined by its flags plus an explicit seed; CSV outputs start with a
``# schema=1`` header line and JSON outputs carry ``"schema": 1``.  Angles
are accepted in radians only.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import core, graphs, mbqc, pulses, qec, tomography
from .core import CoreError

SCHEMA = 1
VERIFY_TOL = 1e-9
FULL_TOMO_MAX_QUBITS = 6


# --------------------------------------------------------------------------
# experiment configuration (key=value sections, reproducible round trip)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: tuple[tuple[str, str], ...]

    def to_text(self) -> str:
        lines = ["[experiment]", f"command={self.command}"]
        for k, v in sorted(self.params):
            lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        command = None
        params = []
        section = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1]
                continue
            if section != "experiment" or "=" not in line:
                raise CoreError(f"malformed config line {raw!r}")
            key, value = line.split("=", 1)
            if key == "command":
                command = value
            else:
                params.append((key, value))
        if command is None:
            raise CoreError("config missing command")
        return cls(command, tuple(sorted(params)))

    def to_dict(self) -> dict:
        return dict(self.params)


def _config_from_args(args: argparse.Namespace, keys: list[str]) -> ExperimentConfig:
    params = []
    for k in keys:
        v = getattr(args, k.replace("-", "_"), None)
        if v is not None:
            params.append((k, str(v)))
    return ExperimentConfig(args.command, tuple(sorted(params)))


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: str | Path, header: list[str], rows: list[list]) -> None:
    lines = [f"# schema={SCHEMA}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path: str | Path, payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, steps = text.split(":")
        return np.linspace(float(start), float(stop), int(steps))
    except ValueError as exc:
        raise CoreError(f"bad grid spec {text!r}; expected start:stop:steps") from exc


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_verify(args) -> int:
    family = args.family.upper()
    n = args.n
    seq = pulses.compile_graph(family, n)
    native = pulses.simulate_sequence(seq, core.StateVector.all_ones(seq.num_qubits))
    target_native = pulses.native_state(family, n)
    f_native = core.fidelity(native, target_native)
    table = graphs.table_for_family(family, n if n is not None else _family_size(family))
    corrected = graphs.apply_correction_table(native, table)
    g = graphs.family_graph(family, n)
    canonical = graphs.build_graph_state(g)
    f_canon = core.fidelity(corrected, canonical)
    gen_vals = [k.expectation(corrected) for k in graphs.stabilizer_generators(g)]
    print(f"family={family} qubits={seq.num_qubits} pulses={len(seq)}")
    print(f"native-state fidelity      = {f_native:.12f}")
    print(f"corrected-state fidelity   = {f_canon:.12f}")
    print("stabilizer generators      = " + " ".join(f"{v:+.9f}" for v in gen_vals))
    ok = f_canon >= 1 - VERIFY_TOL and all(v >= 1 - 1e-8 for v in gen_vals)
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def _family_size(family: str) -> int | None:
    family = family.upper()
    if family.startswith("EC") and len(family) > 2:
        return int(family[2:])
    if family.startswith("GHZ") and len(family) > 3:
        return int(family[3:])
    return None


def cmd_compile(args) -> int:
    seq = pulses.compile_graph(args.family.upper(), args.n)
    text = pulses.dumps(seq)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _parse_angles(spec: str, arity: int) -> list[tuple[float, ...]]:
    out = []
    for group in spec.split(";"):
        vals = tuple(float(x) for x in group.split(","))
        if len(vals) != arity:
            raise CoreError(f"angle group {group!r} needs {arity} values")
        out.append(vals)
    return out


def cmd_gates(args) -> int:
    mode = args.mode
    if args.pattern == "single":
        rows = []
        for a, b, g in _parse_angles(args.angles, 3):
            res = mbqc.run_single_qubit_pattern(a, b, g, mode=mode, seed=args.seed,
                                                shots=args.shots)
            oracle = mbqc.single_qubit_oracle_state(a, b, g)
            x, y, z = mbqc.bloch_vector(res.output)
            rows.append([a, b, g, x, y, z, core.fidelity(res.output, oracle)])
        write_csv(args.out, ["alpha", "beta", "gamma", "x", "y", "z", "oracle_fidelity"], rows)
        return 0
    rows = []
    header = ["alpha", "beta"]
    header += [f"re{i}{j}" for i in range(4) for j in range(4)]
    header += [f"im{i}{j}" for i in range(4) for j in range(4)]
    header += ["tangle", "oracle_fidelity"]
    for a, b in _parse_angles(args.angles, 2):
        res = mbqc.run_two_qubit_pattern(a, b, mode=mode, seed=args.seed, shots=args.shots)
        oracle = mbqc.two_qubit_oracle_state(a, b)
        m = res.output.matrix
        row = [a, b]
        row += [float(m[i, j].real) for i in range(4) for j in range(4)]
        row += [float(m[i, j].imag) for i in range(4) for j in range(4)]
        row += [core.tangle(res.output), core.fidelity(res.output, oracle)]
        rows.append(row)
    write_csv(args.out, header, rows)
    return 0


def _parse_targets(text: str, n: int):
    if text == "all":
        return None
    labels = [t.strip() for t in text.split(",") if t.strip()]
    out = []
    for lab in labels:
        if not lab.upper().startswith("C"):
            raise CoreError(f"bad target {lab!r}; expected C<i> labels or 'all'")
        out.append(int(lab[1:]))
    return tuple(out)


def cmd_qec(args) -> int:
    n = args.n
    grid = _parse_grid(args.p_grid)
    targets = _parse_targets(args.targets, n)
    input_set = {"4": "four", "6": "six"}[args.inputs]
    report = qec.atf(n, grid, targets, input_set)
    all_targets = targets is None or set(targets) == set(range(1, n + 1))
    rows = []
    labels = qec.FOUR_STATE_SET if input_set == "four" else qec.SIX_STATE_SET
    for i, p in enumerate(report.p_grid):
        ideal = qec.ideal_atf_curve(n, p, input_set) if all_targets else float("nan")
        for lab in labels:
            rows.append([n, float(p), lab, report.per_input[lab][i],
                         report.atf[i], ideal])
    write_csv(args.out, ["n", "p", "input", "fidelity", "atf", "atf_ideal"], rows)
    return 0


def cmd_bell(args) -> int:
    family = args.family.upper()
    if args.graph_file:
        g = graphs.read_edge_list(args.graph_file, family=family)
    else:
        g = graphs.family_graph(family, _family_size(family))
    state: core.State = graphs.build_graph_state(g)
    if args.noise_strength:
        rho = state.to_density()
        for q in range(g.num_vertices):
            rho = core.apply_channel(rho, core.NoiseChannel(args.noise_kind,
                                                            args.noise_strength, q))
        state = rho
    report = graphs.bell_expectation(state, g)
    payload = {
        "family": family,
        "qubits": g.num_vertices,
        "expectation": report.expectation,
        "lhv_bound": report.lhv_bound,
        "violated": report.violated,
    }
    if args.shots:
        settings = tomography.MeasurementSettings(tuple(tomography.bell_settings(g)),
                                                  args.shots)
        counts = tomography.sample_counts(state, settings, args.seed)
        est = tomography.bell_from_counts(counts, g)
        rng = np.random.default_rng(args.seed)
        vals = []
        for _ in range(args.trials):
            resampled = {
                s: rng.multinomial(args.shots, counts.frequencies(s)).astype(float)
                for s in counts.settings()
            }
            vals.append(tomography.bell_from_counts(
                tomography.CountsTable(g.num_vertices, args.shots, resampled), g))
        payload["estimate"] = est
        payload["estimate_std"] = float(np.std(vals, ddof=1))
        payload["estimate_violated"] = bool(est > report.lhv_bound)
    write_json(args.out, payload)
    return 0


def cmd_tomo(args) -> int:
    family = args.family.upper()
    nq = _family_size(family)
    g = graphs.family_graph(family, nq)
    target = graphs.build_graph_state(g)
    state: core.State = target
    if args.noise_strength:
        rho = state.to_density()
        for q in range(g.num_vertices):
            rho = core.apply_channel(rho, core.NoiseChannel(args.noise_kind,
                                                            args.noise_strength, q))
        state = rho
    n = g.num_vertices
    if args.bell_only:
        settings = tomography.MeasurementSettings(tuple(tomography.bell_settings(g)),
                                                  args.shots)
        counts = tomography.sample_counts(state, settings, args.seed)
        payload = {
            "family": family,
            "qubits": n,
            "mode": "bell-subset",
            "bell": tomography.bell_from_counts(counts, g),
            "lhv_bound": graphs.lhv_bound(g),
            "settings_used": len(settings.settings),
        }
        write_json(args.out, payload)
        return 0
    if n > FULL_TOMO_MAX_QUBITS:
        raise CoreError(
            f"full tomography of {n} qubits needs 3^{n} settings, which is "
            f"impractical here; rerun with --bell-only for the stabilizer subset"
        )
    settings = tomography.all_settings(n, args.shots)
    if args.exact:
        counts = tomography.exact_counts(state, settings)
    else:
        counts = tomography.sample_counts(state, settings, args.seed)
    if args.save_counts:
        tomography.write_counts_csv(counts, args.save_counts)
    result = tomography.mle_reconstruct(counts)
    rho = result.rho
    payload = {
        "family": family,
        "qubits": n,
        "mode": "full",
        "shots": args.shots,
        "exact": bool(args.exact),
        "iterations": result.iterations,
        "converged": result.converged,
        "fidelity": core.fidelity(rho, target),
        "purity": core.purity(rho),
        "bell": tomography.bell_from_counts(counts, g),
        "lhv_bound": graphs.lhv_bound(g),
    }
    if n == 2:
        payload["tangle"] = core.tangle(rho)
    if args.trials and not args.exact:
        mean_f, std_f = tomography.mc_error_bar(
            counts, args.trials, lambda r: core.fidelity(r, target), args.seed)
        payload["fidelity_mc_mean"] = mean_f
        payload["fidelity_std"] = std_f
        mean_p, std_p = tomography.mc_error_bar(
            counts, args.trials, core.purity, args.seed)
        payload["purity_mc_mean"] = mean_p
        payload["purity_std"] = std_p
    write_json(args.out, payload)
    rho_rows = []
    dim = 2 ** n
    for i in range(dim):
        for j in range(dim):
            rho_rows.append([i, j, float(rho.matrix[i, j].real), float(rho.matrix[i, j].imag)])
    write_csv(str(args.out) + ".rho.csv", ["row", "col", "re", "im"], rho_rows)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ionmbqc",
                                 description="graph-state MBQC experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="compile, simulate, correct, check")
    p.add_argument("family")
    p.add_argument("n", nargs="?", type=int, default=None)

    p = sub.add_parser("compile", help="dump a pulse program")
    p.add_argument("family")
    p.add_argument("n", nargs="?", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("gates", help="run an MBQC measurement pattern")
    p.add_argument("--pattern", choices=("single", "two"), required=True)
    p.add_argument("--angles", required=True,
                   help="radians: 'a,b,g;a,b,g;...' (single) or 'a,b;...' (two)")
    p.add_argument("--mode", choices=("branch", "sample"), default="branch")
    p.add_argument("--shots", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("qec", help="ATF sweep of the repetition code")
    p.add_argument("--n", type=int, required=True, choices=(1, 3, 5))
    p.add_argument("--targets", default="all")
    p.add_argument("--p-grid", default="0:1:21")
    p.add_argument("--inputs", choices=("4", "6"), default="4")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bell", help="Bell-operator report for a family")
    p.add_argument("--family", required=True)
    p.add_argument("--graph-file", default=None,
                   help="edge-list file: vertex count, then one 'a b' pair per line")
    p.add_argument("--noise-kind", choices=("dephase", "depolarize"), default="depolarize")
    p.add_argument("--noise-strength", type=float, default=0.0)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("tomo", help="simulated tomography study")
    p.add_argument("--family", required=True)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--noise-kind", choices=("dephase", "depolarize"), default="depolarize")
    p.add_argument("--noise-strength", type=float, default=0.0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--bell-only", action="store_true")
    p.add_argument("--save-counts", default=None)
    p.add_argument("--out", required=True)

    for sp in sub.choices.values():
        sp.add_argument("--save-config", default=None)
    ap.add_argument("--config", default=None, help="replay a saved experiment config")
    return ap


_CONFIG_KEYS = {
    "verify": ["family", "n"],
    "compile": ["family", "n", "out"],
    "gates": ["pattern", "angles", "mode", "shots", "seed", "out"],
    "qec": ["n", "targets", "p-grid", "inputs", "out"],
    "bell": ["family", "graph-file", "noise-kind", "noise-strength", "shots",
             "trials", "seed", "out"],
    "tomo": ["family", "shots", "seed", "trials", "noise-kind", "noise-strength",
             "exact", "bell-only", "save-counts", "out"],
}

_HANDLERS = {
    "verify": cmd_verify,
    "compile": cmd_compile,
    "gates": cmd_gates,
    "qec": cmd_qec,
    "bell": cmd_bell,
    "tomo": cmd_tomo,
}


def _args_from_config(cfg: ExperimentConfig) -> list[str]:
    argv = [cfg.command]
    d = cfg.to_dict()
    if cfg.command in ("verify", "compile"):
        argv.append(d.pop("family"))
        n = d.pop("n", None)
        if n not in (None, "None"):
            argv.append(n)
    for k, v in sorted(d.items()):
        if v == "None":
            continue
        if v in ("True", "False"):
            if v == "True":
                argv.append(f"--{k}")
            continue
        argv.extend([f"--{k}", v])
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if argv and argv[0] == "--config":
        cfg = ExperimentConfig.from_text(Path(argv[1]).read_text())
        argv = _args_from_config(cfg) + argv[2:]
    args = parser.parse_args(argv)
    try:
        if args.save_config:
            cfg = _config_from_args(args, _CONFIG_KEYS[args.command])
            Path(args.save_config).write_text(cfg.to_text())
        return _HANDLERS[args.command](args)
    except CoreError as exc:
        sys.stderr.write(json.dumps({"schema": SCHEMA, "error": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
