"""``pxbar`` command-line harness.

Exit status: 0 success, 2 usage error, 3 config error, 4 input schema error,
5 model/runtime error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import ann, crossbar, optics, toydata
from .config import ExperimentConfig, load_config
from .csvio import read_matrix, read_samples, read_table, read_vector, write_csv
from .device import Pulse, apply_pulse, conductance, resistance_class
from .energy import Trace, energy_report, report_from_rows
from .errors import ConfigError, InvariantError, ParseError, PxbarError, SchemaError
from .materials import lookup_nk, mixed_index, mixed_permittivity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SCHEMA = 4
EXIT_MODEL = 5


def _write(cfg: ExperimentConfig, name: str, header, rows) -> Path:
    path = write_csv(cfg.out_dir / name, header, rows, cfg.digest, cfg.seed)
    print(f"wrote {path}")
    return path


# ------------------------------------------------------------------ materials


def cmd_materials(cfg: ExperimentConfig, args) -> int:
    mat = cfg.material
    wl = args.wavelength if args.wavelength is not None else cfg.geometry.wavelength
    lo, hi = mat.span
    print(f"material {mat.name}: {len(mat.table)} rows, {lo:g}-{hi:g} nm, "
          f"g_a={mat.g_amorphous:g} S, g_c={mat.g_crystalline:g} S (ratio {mat.conductance_ratio:g})")
    idx_a = lookup_nk(mat, "amorphous", wl)
    idx_c = lookup_nk(mat, "crystalline", wl)
    rows = []
    for x in _unit_grid(args.x_points):
        idx = mixed_index(x, idx_a, idx_c)
        eps = mixed_permittivity(x, idx_a, idx_c)
        rows.append((wl, x, idx.real, idx.imag, eps.real, eps.imag))
    _write(cfg, "materials.csv", ("wavelength_nm", "x", "n", "k", "eps_re", "eps_im"), rows)
    return EXIT_OK


def _unit_grid(points: int) -> list[float]:
    if points < 1:
        raise SchemaError("grid needs at least 1 point")
    if points == 1:
        return [0.0]
    return [i / (points - 1) for i in range(points)]


# ------------------------------------------------------------------- optics


def cmd_optics_sweep(cfg: ExperimentConfig, args) -> int:
    geom, mat = cfg.geometry, cfg.material
    if args.dn_max is not None:
        n = args.dn_points
        if n < 3 or n % 2 == 0:
            raise SchemaError("--dn-points must be odd and >= 3")
        half = (n - 1) // 2
        step = args.dn_max / half
        # mirror positive values so the grid is exactly symmetric
        pos = [k * step for k in range(1, half + 1)]
        grid = [-v for v in reversed(pos)] + [0.0] + pos
        rows = []
        for dn in grid:
            alpha = optics.metal_loss(geom, dn)
            n_mode = geom.n_mode0 + geom.side_sign * dn
            l_prop = optics.propagation_length(alpha) if alpha > 0 else math.inf
            t = math.exp(-alpha * geom.length)
            phi = math.fmod(2 * math.pi / geom.wavelength_m * n_mode * geom.length, 2 * math.pi)
            rows.append((dn, alpha, l_prop, n_mode, t, phi))
        _write(cfg, "optics_sweep.csv",
               ("dn", "alpha_metal_per_m", "l_prop_m", "n_mode", "transmission", "phase_rad"), rows)
        return EXIT_OK

    xs = [float(v) for v in args.x_values.split(",")] if args.x_values else _unit_grid(args.x_points)
    rows = []
    for x in xs:
        dn = optics.imbalance(geom, mat, x)
        alpha = optics.loss_coefficient(geom, mat, x)
        t, phi = optics.cell_transmission(geom, mat, x)
        rows.append((x, dn, alpha, optics.propagation_length(alpha), optics.mode_index(geom, mat, x), t, phi))
    _write(cfg, "optics_sweep.csv",
           ("x", "dn", "alpha_per_m", "l_prop_m", "n_mode", "transmission", "phase_rad"), rows)
    return EXIT_OK


# -------------------------------------------------------------- memory demo


def memory_demo_rows(cfg: ExperimentConfig, writes: int, erases: int, write_duration: float | None,
                     domain: str = "electrical") -> list[tuple]:
    """One cell: ``writes`` graded set pulses then ``erases`` reset pulses."""
    p, geom, mat = cfg.device, cfg.geometry, cfg.material
    duration = write_duration if write_duration is not None else p.tau_set / 16
    arr = cfg.make_array(1, 1)
    state = arr.cells[0][0]

    def row(i):
        t, _ = optics.cell_transmission(geom, mat, state.s)
        return (i, state.s, conductance(state, p), resistance_class(state, p).value, t)

    out = [row(0)]
    script = [Pulse(domain, "set", p.v_set, duration)] * writes
    script += [Pulse(domain, "reset", p.v_reset, duration)] * erases
    for i, pulse in enumerate(script, start=1):
        state = apply_pulse(state, pulse, p)
        out.append(row(i))
    return out


def cmd_memory_demo(cfg: ExperimentConfig, args) -> int:
    rows = memory_demo_rows(cfg, args.writes, args.erases, args.write_duration_s, args.domain)
    _write(cfg, "memory_demo.csv", ("pulse", "s", "conductance_S", "class", "transmission"), rows)
    return EXIT_OK


# ---------------------------------------------------------------------- xbar


def _initial_array(cfg: ExperimentConfig, args) -> crossbar.CrossbarArray:
    if args.conductances and args.states:
        raise SchemaError("give at most one of --conductances and --states")
    if args.conductances:
        g = read_matrix(args.conductances)
        arr = cfg.make_array(*g.shape)
        try:
            arr.write_conductances(g)
        except PxbarError as exc:
            raise SchemaError(f"{args.conductances}: {exc}") from exc
        return arr
    if args.states:
        s = read_matrix(args.states)
        arr = cfg.make_array(*s.shape)
        try:
            arr.write_states(s)
        except ValueError as exc:
            raise SchemaError(f"{args.states}: {exc}") from exc
        return arr
    return cfg.make_array()


def cmd_xbar(cfg: ExperimentConfig, args) -> int:
    arr = _initial_array(cfg, args)
    prog = cfg.section("program")
    if args.action == "vmm":
        if not args.input:
            raise SchemaError("xbar vmm needs --input")
        v = read_vector(args.input)
        if v.shape[0] != arr.rows:
            raise SchemaError(f"{args.input}: {v.shape[0]} voltages for {arr.rows} rows")
        current = crossbar.vmm(arr, v, args.mode)
        _write(cfg, "xbar_vmm.csv", ("col", "current_A"), list(enumerate(current)))
    elif args.action == "program":
        if not args.target:
            raise SchemaError("xbar program needs --target")
        target = read_matrix(args.target)
        if target.shape != arr.shape:
            raise SchemaError(f"{args.target}: shape {target.shape} != array {arr.shape}")
        tol = args.tol if args.tol is not None else float(prog.get("tol", 0.01))
        max_pulses = args.max_pulses if args.max_pulses is not None else int(prog.get("max_pulses", 64))
        report = crossbar.program_array(arr, target, tol, max_pulses, prog.get("domain", "electrical"))
        g = crossbar.conductance_matrix(arr)
        rows = []
        for n in range(arr.rows):
            for m in range(arr.cols):
                rows.append((n, m, target[n, m], g[n, m], report.pulses[n, m],
                             report.success[n, m], report.errors.get((n, m), "")))
        _write(cfg, "xbar_program.csv",
               ("row", "col", "target_S", "final_S", "pulses", "success", "error"), rows)
        print(f"total pulses {report.total_pulses}, program energy {report.program_energy:.12g} J, "
              f"{int(report.success.sum())}/{report.success.size} cells within tolerance")
    else:
        snap = crossbar.electro_optic_snapshot(arr)
        rows = [(c.row, c.col, c.s, c.conductance, c.resistance_class.value, c.transmission, c.phase)
                for c in snap]
        _write(cfg, "xbar_snapshot.csv", crossbar.SNAPSHOT_HEADER, rows)
    return EXIT_OK


# ----------------------------------------------------------------------- ann


def cmd_ann_train(cfg: ExperimentConfig, args) -> int:
    a = cfg.section("ann")
    x_tr, y_tr = toydata.make_blobs(int(a.get("train_points", 600)), cfg.seed)
    x_te, y_te = toydata.make_blobs(int(a.get("test_points", 300)), cfg.seed + 1)
    x_tr, x_te = toydata.with_bias(x_tr), toydata.with_bias(x_te)
    weights = toydata.train_mlp(
        x_tr, y_tr, hidden=int(a.get("hidden", 8)), seed=cfg.seed,
        epochs=int(a.get("epochs", 500)), lr=float(a.get("learning_rate", 0.1)),
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for i, (w, act) in enumerate(zip(weights, toydata.MLP_ACTIVATIONS), start=1):
        path = cfg.out_dir / f"layer{i}.csv"
        ann.write_weights_csv(path, w, act)
        print(f"wrote {path}")
    header = [f"x{i}" for i in range(x_tr.shape[1])] + ["label"]
    for name, x, y in (("train.csv", x_tr, y_tr), ("test.csv", x_te, y_te)):
        _write(cfg, name, header, [(*row, int(lbl)) for row, lbl in zip(x, y)])
    print(f"float accuracy: train {toydata.float_accuracy(weights, x_tr, y_tr):.6f}, "
          f"test {toydata.float_accuracy(weights, x_te, y_te):.6f}")
    return EXIT_OK


def cmd_ann_infer(cfg: ExperimentConfig, args) -> int:
    layers = [ann.read_weights_csv(p) for p in args.weights]
    x, labels = read_samples(args.input)
    if x.shape[1] != layers[0][0].shape[0]:
        raise SchemaError(f"{args.input}: {x.shape[1]} features, first layer expects {layers[0][0].shape[0]}")
    for (w_prev, _), (w_next, _), path in zip(layers, layers[1:], args.weights[1:]):
        if w_prev.shape[1] != w_next.shape[0]:
            raise SchemaError(f"{path}: {w_next.shape[0]} rows do not match previous layer's {w_prev.shape[1]} outputs")

    read = cfg.section("read")
    prog = cfg.section("program")
    trace = Trace()
    tol = args.program_tol
    mappings = [
        ann.map_layer(w, cfg.make_array, act, tol, int(prog.get("max_pulses", 64)), trace)
        for w, act in layers
    ]
    out = ann.forward(mappings, x, args.mode, float(read.get("v_read", 0.2)), read.get("v_scale"), trace)
    pred = np.argmax(out, axis=1)
    float_out = ann.float_forward([w for w, _ in layers], [a for _, a in layers], x)

    if labels is not None:
        rows = [(i, int(p), int(lbl)) for i, (p, lbl) in enumerate(zip(pred, labels))]
        _write(cfg, "predictions.csv", ("index", "prediction", "label"), rows)
    else:
        _write(cfg, "predictions.csv", ("index", "prediction"), list(enumerate(pred.tolist())))
    _write(cfg, "trace.csv", ("kind", "macs", "energy_J", "duration_s"), trace.summary_rows())
    report = energy_report(trace)
    summary = list(report.as_dict().items())
    if labels is not None:
        summary += [("accuracy", float(np.mean(pred == labels))),
                    ("float_accuracy", float(np.mean(np.argmax(float_out, axis=1) == labels)))]
    _write(cfg, "energy.csv", ("metric", "value"), summary)
    print(report.to_text())
    if labels is not None:
        print(f"accuracy {summary[-2][1]:.6f} (float oracle {summary[-1][1]:.6f})")
    return EXIT_OK


def cmd_report(cfg: ExperimentConfig, args) -> int:
    header, rows = read_table(args.trace)
    if header != ["kind", "macs", "energy_J", "duration_s"]:
        raise SchemaError(f"{args.trace}: expected header kind,macs,energy_J,duration_s")
    parsed = []
    for lineno, fields in rows:
        if len(fields) != 4 or fields[0] not in ("read", "program"):
            raise SchemaError(f"{args.trace}:{lineno}: malformed trace row")
        parsed.append(fields)
    report = report_from_rows(parsed)
    print(report.to_text())
    _write(cfg, "report.csv", ("metric", "value"), list(report.as_dict().items()))
    return EXIT_OK


# ---------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML config (default: bundled default.toml)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value, e.g. --set geometry.gamma=0.2")

    parser = argparse.ArgumentParser(prog="pxbar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("materials", parents=[common], help="material table and mixed index vs x")
    p.add_argument("--wavelength", type=float, help="nm (default: geometry wavelength)")
    p.add_argument("--x-points", type=int, default=11)
    p.set_defaults(func=cmd_materials)

    p = sub.add_parser("optics-sweep", parents=[common], help="cell loss/phase over x or imbalance")
    p.add_argument("--x-points", type=int, default=101)
    p.add_argument("--x-values", help="comma-separated crystalline fractions")
    p.add_argument("--dn-max", type=float, help="sweep imbalance over [-dn_max, dn_max] instead")
    p.add_argument("--dn-points", type=int, default=201)
    p.set_defaults(func=cmd_optics_sweep)

    p = sub.add_parser("memory-demo", parents=[common], help="write-then-erase series on one cell")
    p.add_argument("--writes", type=int, default=20)
    p.add_argument("--erases", type=int, default=1)
    p.add_argument("--write-duration-s", type=float, help="default tau_set/16")
    p.add_argument("--domain", choices=("electrical", "optical"), default="electrical")
    p.set_defaults(func=cmd_memory_demo)

    p = sub.add_parser("xbar", parents=[common], help="crossbar vmm / program / snapshot")
    p.add_argument("action", choices=("vmm", "program", "snapshot"))
    p.add_argument("--conductances", type=Path, help="initial conductance matrix CSV (S)")
    p.add_argument("--states", type=Path, help="initial state matrix CSV (s in [0,1])")
    p.add_argument("--input", type=Path, help="row voltage vector CSV (vmm)")
    p.add_argument("--mode", choices=("ideal", "nonideal"), default="ideal")
    p.add_argument("--target", type=Path, help="target conductance matrix CSV (program)")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-pulses", type=int)
    p.set_defaults(func=cmd_xbar)

    p = sub.add_parser("ann-train", parents=[common], help="toy blobs dataset + float-trained weight fixtures")
    p.set_defaults(func=cmd_ann_train)

    p = sub.add_parser("ann-infer", parents=[common], help="crossbar inference with energy report")
    p.add_argument("--weights", type=Path, nargs="+", required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--mode", choices=("ideal", "nonideal"), default="ideal")
    p.add_argument("--program-tol", type=float,
                   help="program-and-verify tolerance (default: write exact conductances)")
    p.set_defaults(func=cmd_ann_infer)

    p = sub.add_parser("report", parents=[common], help="energy report from a trace CSV")
    p.add_argument("--trace", type=Path, required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides, args.seed, args.out)
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"pxbar: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaError, ParseError, InvariantError) as exc:
        print(f"pxbar: input error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (PxbarError, ValueError, ArithmeticError) as exc:
        print(f"pxbar: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
