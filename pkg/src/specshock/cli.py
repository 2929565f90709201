"""Benchmark runner: parse a request, run examples, write CSV artifacts and plots.

Exit codes: 0 success, 1 solver abort or failed suite row, 2 usage error,
3 unwritable output location.
"""

from __future__ import annotations

import argparse
import sys
import time as _time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import reference
from .integrate import FOURIER, PHYSICAL, SimulationConfig, run_simulation
from .kernels import RSK, DEFAULT_HALF_WIDTH, FilterSpec
from .physics import BC_REFLECTIVE, BC_WALL_END, ProblemSpec, problem
from .reference import error_norms, wrap_augment

_FLOAT_FMT = "%.17g"

_DEFAULT_NOTES = """\
benchmark presets (example: grid, time step, filter ratio r; all overridable):
  1  advection, composite profile   N=128 (r=0.6) or 256 (r=0.8), dt=0.001, t=8
  2  advection, W profile           N=128 (r=0.6) or 256 (r=0.8), dt=0.001, t=8
  3  Burgers shock                  N=129 (r=0.7) or 257 (r=0.8), dt=0.005, t=2
  4  Burgers rarefaction            N=129 or 257 (r=0.6), dt=0.005, t=2
  5  non-convex flux                N=65 or 129 (r=0.8), dt=0.0005, t=0.04
  6  shock tubes                    --case sod (r=1.1) | lax (r=0.95), N=129, dt=0.02
  7  1D shock/entropy waves         --case k13 N=513 (r=2.0) .. k52 N=2049 (r=2.1)
  8  Shu-Osher                      N=129 (r=2.0) or 257 (r=2.1), t=0.47
  9  2D oblique shock/entropy       513x32, r=2.1
  10 shock/vortex                   257x129, r=2.8, CFL=0.5, physical filter
  11 isentropic vortex              --case eta1 (r=3.2, CFL=0.01, t=2)
                                    | eta05 (r=2.8, CFL=0.5, t=100), N=64
  12 flow past a cylinder           65x129, r=1.2, t=4.5, physical filter
"""


@dataclass
class RunRequest:
    example: int
    case: str | None = None
    n: int | None = None
    n_y: int | None = None
    ratio: float | None = None
    dt: float | None = None
    cfl: float | None = None
    t_final: float | None = None
    half_width: int = DEFAULT_HALF_WIDTH
    filter_domain: str | None = None
    sensor_threshold: float | None = None
    no_filter: bool = False
    out: Path = Path("specshock-out")
    emit_plots: bool = False
    table: int | None = None
    suite: str | None = None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specshock",
        description="Filtered Fourier pseudospectral benchmark runner",
        epilog=_DEFAULT_NOTES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--example", type=int, choices=range(1, 13), metavar="1..12",
                       help="benchmark to run")
    group.add_argument("--suite", type=str, metavar="all|1,2,...",
                       help="run a set of examples against their pass thresholds")
    parser.add_argument("--case", type=str, help="variant (sod/lax, k13..k52, eta1/eta05, n129...)")
    parser.add_argument("--n", type=int, help="grid points (first axis)")
    parser.add_argument("--ny", type=int, dest="n_y", help="grid points (second axis)")
    parser.add_argument("--r", type=float, dest="ratio", help="filter ratio sigma/delta")
    parser.add_argument("--dt", type=float, help="fixed time step")
    parser.add_argument("--cfl", type=float, help="CFL number (recomputed every step)")
    parser.add_argument("--t-final", type=float, dest="t_final", help="final time")
    parser.add_argument("--w", type=int, dest="half_width", default=DEFAULT_HALF_WIDTH,
                        help="filter stencil half-width (default 32)")
    parser.add_argument("--filter-domain", choices=(FOURIER, PHYSICAL), dest="filter_domain")
    parser.add_argument("--sensor-threshold", type=float, dest="sensor_threshold",
                        help="TV growth ratio that activates the filter (default 1+1e-4)")
    parser.add_argument("--no-filter", action="store_true", help="disable the lowpass filter")
    parser.add_argument("--out", type=Path, default=Path("specshock-out"), help="output directory")
    parser.add_argument("--emit-plots", action="store_true", help="write standalone plot scripts")
    parser.add_argument("--table", type=int, choices=(1, 2),
                        help="reproduce accuracy table 1 or long-time table 2 (example 11)")
    return parser


def parse_args(argv) -> RunRequest:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.dt is not None and args.cfl is not None:
        parser.error("--dt and --cfl are mutually exclusive")
    if args.table is not None and args.example not in (None, 11):
        parser.error("--table applies to example 11 only")
    request = RunRequest(
        example=args.example if args.example is not None else 11,
        case=args.case, n=args.n, n_y=args.n_y, ratio=args.ratio, dt=args.dt,
        cfl=args.cfl, t_final=args.t_final, half_width=args.half_width,
        filter_domain=args.filter_domain, sensor_threshold=args.sensor_threshold,
        no_filter=args.no_filter, out=args.out, emit_plots=args.emit_plots,
        table=args.table, suite=args.suite,
    )
    return request


def build_config(req: RunRequest) -> SimulationConfig:
    spec = problem(req.example, case=req.case, n=req.n, n_y=req.n_y)
    if req.ratio is not None:
        spec = replace(spec, filter_ratio=req.ratio)
    if req.dt is not None:
        spec = replace(spec, dt=req.dt, cfl=None)
    if req.cfl is not None:
        spec = replace(spec, dt=None, cfl=req.cfl)
    if req.t_final is not None:
        spec = replace(spec, t_final=req.t_final)
    kwargs = {}
    if req.sensor_threshold is not None:
        from .filtering import SensorConfig

        kwargs["sensor"] = SensorConfig(threshold=req.sensor_threshold)
    return SimulationConfig(
        problem=spec,
        filter_spec=FilterSpec(RSK, half_width=req.half_width, ratio=spec.filter_ratio),
        filter_domain=req.filter_domain,
        filter_enabled=not req.no_filter,
        **kwargs,
    )


# -- CSV helpers ----------------------------------------------------------------


def _write_csv(path: Path, meta: list[str], names: list[str], columns: list[np.ndarray]):
    lines = [f"# {entry}" for entry in meta]
    lines.append(",".join(names))
    rows = np.column_stack([np.asarray(col, dtype=float) for col in columns])
    for row in rows:
        lines.append(",".join(_FLOAT_FMT % value for value in row))
    path.write_text("\n".join(lines) + "\n")


def _field_columns(result) -> tuple[list[str], list[np.ndarray]]:
    spec = result.problem
    grid = spec.grid
    if spec.system == "scalar":
        return ["x", "u"], [grid.coordinates(0), result.fields[0]]
    if grid.ndim == 1:
        x = grid.coordinates(0)
        rho = result.fields[0]
        vel = result.fields[1] / rho
        from .physics import pressure

        p = pressure(result.fields, spec.gamma)
        return (["x", "density", "velocity", "pressure", "energy"],
                [x, rho, vel, p, result.fields[-1]])
    if result.geometry is not None:
        x, y = result.geometry.x, result.geometry.y
    else:
        x, y = grid.mesh()
    rho = result.fields[0]
    u = result.fields[1] / rho
    v = result.fields[2] / rho
    from .physics import pressure

    p = pressure(result.fields, spec.gamma)
    cols = [x, y, rho, u, v, p, result.fields[-1]]
    return (["x", "y", "density", "velocity_x", "velocity_y", "pressure", "energy"],
            [c.ravel() for c in cols])


def compute_reference_errors(result) -> list:
    """Paper-convention error rows for examples with a usable reference."""
    spec = result.problem
    grid = spec.grid
    t = result.time
    rows = []
    if spec.example in (1, 2):
        from .physics import advection_composite_profile, advection_wshape_profile

        sampler = advection_composite_profile if spec.example == 1 else advection_wshape_profile
        exact = reference.advection_exact(sampler, grid.coordinates(0), t,
                                          grid.origins[0], grid.lengths[0])
        rows.append(error_norms(result.fields[0], exact, "u", t))
    elif spec.example in (3, 4):
        kind = "shock" if spec.example == 3 else "rarefaction"
        exact = reference.burgers_exact(kind, grid.coordinates(0), t)
        rows.append(error_norms(result.fields[0], exact, "u", t))
    elif spec.example == 5:
        exact = reference.nonconvex_reference(grid.coordinates(0), t)
        rows.append(error_norms(result.fields[0], exact, "u", t))
    elif spec.example == 6:
        left, right = spec.constants["left"], spec.constants["right"]
        xi = grid.coordinates(0) / t
        rho, _u, _p = reference.riemann_exact(left, right, xi, spec.gamma)
        rows.append(error_norms(result.fields[0], rho, "density", t))
    elif spec.example == 8:
        x_ref, rho_ref = reference.shu_osher_reference()
        exact = np.interp(grid.coordinates(0), x_ref, rho_ref)
        rows.append(error_norms(result.fields[0], exact, "density", t))
    elif spec.example == 11:
        c = spec.constants
        exact = reference.vortex_density_closed(grid, t, c["strength"], c["decay"],
                                                c["center"], spec.gamma)
        rows.append(error_norms(wrap_augment(result.fields[0]), exact, "density", t))
    return rows


_PLOT_1D = """\
#!/usr/bin/env python3
\"\"\"Plot the field columns of fields.csv (one panel per variable).\"\"\"
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("fields.csv", delimiter=",", names=True, comments="#")
names = [n for n in data.dtype.names if n != "x"]
fig, axes = plt.subplots(1, len(names), figsize=(5 * len(names), 4), squeeze=False)
for ax, name in zip(axes[0], names):
    ax.plot(data["x"], data[name], "o-", ms=2.5, lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel(name)
fig.tight_layout()
fig.savefig("fields.png", dpi=160)
print("wrote fields.png")
"""

_PLOT_2D = """\
#!/usr/bin/env python3
\"\"\"Contour the pressure field of fields.csv on the stored grid.\"\"\"
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("fields.csv", delimiter=",", names=True, comments="#")
x, y, p = data["x"], data["y"], data["pressure"]
ny = np.unique(y).size if np.unique(x).size * np.unique(y).size == x.size else None
fig, ax = plt.subplots(figsize=(7, 5))
if ny:
    shape = (x.size // ny, ny)
    ax.contour(x.reshape(shape), y.reshape(shape), p.reshape(shape), levels=30)
else:
    ax.tricontour(x, y, p, levels=30)
ax.set_xlabel("x"); ax.set_ylabel("y"); ax.set_aspect("equal")
fig.tight_layout()
fig.savefig("pressure.png", dpi=160)
print("wrote pressure.png")
"""


def run_benchmark(req: RunRequest) -> int:
    """Run one example and write fields/diagnostics/errors (and plot scripts)."""
    try:
        req.out.mkdir(parents=True, exist_ok=True)
        probe = req.out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as err:
        print(f"error: cannot write to {req.out}: {err}", file=sys.stderr)
        return 3

    if req.table is not None:
        return _run_table(req)

    cfg = build_config(req)
    result = run_simulation(cfg)
    stamp = _time.strftime("%Y-%m-%dT%H:%M:%S")
    meta = [f"generated: {stamp}",
            f"example: {cfg.problem.example} case: {cfg.problem.case}",
            f"n: {'x'.join(map(str, cfg.problem.grid.points))} t: {_FLOAT_FMT % result.time}"]

    names, cols = _field_columns(result)
    _write_csv(req.out / "fields.csv", meta, names, cols)
    diag = result.diagnostics
    _write_csv(req.out / "diagnostics.csv", meta,
               ["step", "t", "total_variation", "filtered", "total_mass",
                "wall_normal_velocity"],
               [diag.steps, diag.times, diag.total_variation,
                [float(f) for f in diag.filtered], diag.mass, diag.wall_normal_velocity])

    if not result.aborted:
        rows = compute_reference_errors(result)
        if rows:
            _write_csv(req.out / "errors.csv", meta, ["n", "time", "l1", "l2"],
                       [[r.n for r in rows], [r.time for r in rows],
                        [r.l1 for r in rows], [r.l2 for r in rows]])
    if req.emit_plots:
        script = _PLOT_1D if cfg.problem.grid.ndim == 1 else _PLOT_2D
        (req.out / "plot_fields.py").write_text(script)

    if result.aborted:
        print(f"example {req.example} aborted at step {result.abort_step} "
              f"(t={result.abort_time:.6g}): {result.abort_reason}", file=sys.stderr)
        return 1
    print(f"example {req.example} done: t={result.time:.6g}, steps={result.steps}, "
          f"filter firings={result.filter_activations}")
    return 0


def _run_table(req: RunRequest) -> int:
    stamp = _time.strftime("%Y-%m-%dT%H:%M:%S")
    if req.table == 1:
        rows = []
        for n in (32, 64, 128):
            sub = replace(req, n=n, table=None, case=req.case or "eta1")
            cfg = build_config(sub)
            result = run_simulation(cfg)
            if result.aborted:
                print(f"N={n} aborted: {result.abort_reason}", file=sys.stderr)
                return 1
            report = compute_reference_errors(result)[0]
            rows.append((n, report.l1, report.l2))
            print(f"N={n:4d}  L1={report.l1:.3e}  L2={report.l2:.3e}")
        _write_csv(req.out / "table1.csv", [f"generated: {stamp}", "vortex accuracy at t=2"],
                   ["n", "l1", "l2"],
                   [[r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]])
        return 0
    # table 2: long-time accuracy checkpoints
    sub = replace(req, table=None, case=req.case or "eta05")
    cfg = build_config(sub)
    horizon = req.t_final if req.t_final is not None else 100.0
    checkpoints = [t for t in (100.0, 200.0, 400.0, 600.0, 800.0, 1000.0) if t <= horizon]
    state = None
    t0 = 0.0
    rows = []
    spec = cfg.problem
    for target in checkpoints:
        cfg_leg = replace(cfg)
        cfg_leg.t_final = target
        result = run_simulation(cfg_leg, initial=state, t0=t0)
        if result.aborted:
            print(f"t={target} aborted: {result.abort_reason}", file=sys.stderr)
            return 1
        state, t0 = result.fields_raw, result.time
        c = spec.constants
        exact = reference.vortex_density_closed(spec.grid, result.time, c["strength"],
                                                c["decay"], c["center"], spec.gamma)
        report = error_norms(wrap_augment(result.fields[0]), exact, "density", result.time)
        rows.append((result.time, report.l1, report.l2))
        print(f"t={result.time:7.1f}  L1={report.l1:.3e}  L2={report.l2:.3e}")
    _write_csv(req.out / "table2.csv", [f"generated: {stamp}", "vortex long-time accuracy"],
               ["t", "l1", "l2"],
               [[r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]])
    return 0


# -- suite ------------------------------------------------------------------------


def _suite_check(example: int) -> tuple[bool, str]:
    """Quick pass/fail gate per example at its preset configuration."""
    if example == 6:
        for case in ("sod", "lax"):
            ok, msg = _suite_run_one(6, case=case)
            if not ok:
                return ok, msg
        return True, "sod and lax within bounds"
    return _suite_run_one(example)


def _suite_run_one(example: int, case: str | None = None) -> tuple[bool, str]:
    spec = problem(example, case=case)
    cfg = SimulationConfig(problem=spec)
    result = run_simulation(cfg)
    if result.aborted:
        return False, f"aborted: {result.abort_reason}"
    grid = spec.grid
    t = result.time
    if example in (1, 2):
        rows = compute_reference_errors(result)
        gate = 2e-2 if example == 1 else 6e-2
        peak_msg = ""
        if example == 1:
            x = grid.coordinates(0)
            window = (x >= -0.8) & (x <= -0.6)
            peak = x[window][np.argmax(result.fields[0][window])]
            if abs(peak + 0.7) > grid.spacing(0):
                return False, f"gaussian peak off by {abs(peak + 0.7):.3g}"
            peak_msg = f", peak at {peak:.4f}"
        ok = rows[0].l1 <= gate
        return ok, f"L1={rows[0].l1:.3e} (gate {gate:g}){peak_msg}"
    if example == 3:
        x = grid.coordinates(0)
        u = result.fields[0]
        crossing = _level_crossing(x, u, 0.5)
        ok = abs(crossing - 1.0) <= grid.spacing(0)
        return ok, f"shock midpoint at x={crossing:.4f} (want 1.0 +- {grid.spacing(0):.3g})"
    if example == 4:
        rows = compute_reference_errors(result)
        return rows[0].l1 <= 5e-3, f"L1={rows[0].l1:.3e} (gate 5e-3)"
    if example == 5:
        # shock-bearing L1 converges at first order, so the factor-4 gate is
        # read across two doublings
        coarse = run_simulation(SimulationConfig(problem=problem(5, n=65)))
        fine = run_simulation(SimulationConfig(problem=problem(5, n=257)))
        for run in (coarse, fine):
            if run.aborted:
                return False, f"refinement run aborted: {run.abort_reason}"
        l1_coarse = compute_reference_errors(coarse)[0].l1
        l1_fine = compute_reference_errors(fine)[0].l1
        ratio = l1_coarse / max(l1_fine, 1e-300)
        return ratio >= 4.0, f"refinement ratio 65->257 {ratio:.2f} (gate 4)"
    if example == 6:
        rows = compute_reference_errors(result)
        gate = 2e-2 if spec.case == "sod" else 4e-2
        return rows[0].l1 <= gate, f"{spec.case} L1={rows[0].l1:.3e} (gate {gate:g})"
    if example == 7:
        from .physics import pressure

        x = grid.coordinates(0)
        rho2, u2 = 27.0 / 7.0, spec.constants["post"][1]
        carrier = rho2 * pressure(result.fields) / result.fields[0]
        wavelength = 2.0 * np.pi / spec.constants["kappa"] / rho2
        head = spec.constants["x_shock"] + u2 * t  # first transmitted wave
        window = (max(5.0, head + 2.0 * wavelength), 8.0)
        _xs, amp = reference.entropy_amplitude_profile(x, carrier, window,
                                                       mean_window=wavelength)
        level = float(np.mean(np.abs(amp)))
        ok = abs(level / 0.08690716 - 1.0) <= 0.10
        return ok, f"entropy amplitude {level:.5f} vs 0.08690716"
    if example == 8:
        rows = compute_reference_errors(result)
        return rows[0].l1 <= 5e-2, f"L1={rows[0].l1:.3e} (gate 5e-2)"
    if example == 9:
        from .physics import pressure

        x = grid.coordinates(0)
        rho2 = spec.constants["post"][0]
        carrier = rho2 * pressure(result.fields) / result.fields[0]
        _xs, amp = reference.entropy_amplitude_2d(x, carrier, (7.4, 8.4))
        target = (spec.constants["eps"] / 0.01) * 0.08744786
        level = float(np.mean(amp))
        ok = abs(level / target - 1.0) <= 0.12
        return ok, f"entropy amplitude {level:.5f} vs {target:.5f}"
    if example == 10:
        worst = max(result.diagnostics.wall_normal_velocity)
        ok = worst <= 1e-10
        return ok, f"max wall-normal velocity {worst:.2e} (gate 1e-10)"
    if example == 11:
        rows = compute_reference_errors(result)
        return rows[0].l1 <= 5e-7, f"L1={rows[0].l1:.3e} (gate 5e-7)"
    if example == 12:
        from .physics import MappedGeometry, curvilinear_rhs, conserved_from_primitive

        geom = result.geometry
        free = conserved_from_primitive(
            np.full(grid.points, 1.4), (np.ones(grid.points), np.zeros(grid.points)), 1.0
        ).fields
        residual = float(np.max(np.abs(curvilinear_rhs(free, geom, wall=False))))
        ok = residual <= 1e-8
        return ok, f"free-stream residual {residual:.2e} (gate 1e-8), ran to t={t:.3g}"
    return False, "unknown example"


def _level_crossing(x: np.ndarray, u: np.ndarray, level: float) -> float:
    below = u < level
    for i in range(u.size - 1):
        if below[i] != below[i + 1]:
            frac = (level - u[i]) / (u[i + 1] - u[i])
            return float(x[i] + frac * (x[i + 1] - x[i]))
    return float("nan")


def run_suite(selection: str) -> int:
    if selection.strip() == "":
        print("example  status  details")
        return 0
    if selection == "all":
        examples = list(range(1, 13))
    else:
        try:
            examples = [int(tok) for tok in selection.split(",") if tok.strip()]
        except ValueError:
            print(f"error: bad suite selection {selection!r}", file=sys.stderr)
            return 2
        if not examples:
            print("example  status  details")
            return 0
    print("example  status  details")
    failures = 0
    for example in examples:
        try:
            ok, message = _suite_check(example)
        except Exception as err:  # a broken run must not kill the other rows
            ok, message = False, f"error: {err}"
        failures += 0 if ok else 1
        print(f"{example:7d}  {'PASS' if ok else 'FAIL':6s}  {message}")
    return 1 if failures else 0


def main(argv=None) -> int:
    req = parse_args(sys.argv[1:] if argv is None else argv)
    if req.suite is not None:
        return run_suite(req.suite)
    return run_benchmark(req)


if __name__ == "__main__":
    sys.exit(main())
