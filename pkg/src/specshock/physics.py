"""Flux functions, state conversions, boundary handling, and benchmark setups.

Covers the scalar conservation laws (advection, Burgers, a non-convex quartic
flux), the 1D/2D compressible Euler equations for an ideal gas, a body-fitted
half-annulus mapping for flow past a cylinder, and the catalog of the twelve
benchmark problems with their default grids, time steps, and filter ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import Grid, mirror_derivative_axis

GAMMA = 1.4

ADVECTION = "advection"
BURGERS = "burgers"
NONCONVEX = "nonconvex"

BC_PERIODIC = "periodic"
BC_OPEN = "open"            # transparent: even doubling of the flux
BC_REFLECTIVE = "reflective"  # slip walls on both sides of the axis
BC_WALL_END = "wall_end"    # inflow at the axis start, slip wall at the end


class StateError(ValueError):
    """Raised when a gas state loses positivity instead of propagating NaN."""


# -- Euler state -------------------------------------------------------------


@dataclass
class EulerState:
    """Conserved fields stacked as (rho, rho*u[, rho*v], E) on the leading axis."""

    fields: np.ndarray
    gamma: float = GAMMA

    def __post_init__(self):
        self.fields = np.asarray(self.fields, dtype=float)
        if self.fields.shape[0] not in (3, 4):
            raise ValueError("expected 3 (1D) or 4 (2D) conserved components")

    @property
    def ndim(self) -> int:
        return self.fields.shape[0] - 2

    @property
    def density(self) -> np.ndarray:
        return self.fields[0]

    def momentum(self, axis: int = 0) -> np.ndarray:
        return self.fields[1 + axis]

    @property
    def energy(self) -> np.ndarray:
        return self.fields[-1]

    def velocity(self, axis: int = 0) -> np.ndarray:
        return self.fields[1 + axis] / self.fields[0]

    @property
    def pressure(self) -> np.ndarray:
        return pressure(self.fields, self.gamma)

    @property
    def sound_speed(self) -> np.ndarray:
        return np.sqrt(self.gamma * self.pressure / self.density)

    def validate(self):
        validate_positive(self.fields, self.gamma)
        return self


def kinetic_energy(fields: np.ndarray) -> np.ndarray:
    mom2 = np.zeros_like(fields[0])
    for comp in fields[1:-1]:
        mom2 += comp * comp
    return 0.5 * mom2 / fields[0]


def pressure(fields: np.ndarray, gamma: float = GAMMA) -> np.ndarray:
    return (gamma - 1.0) * (fields[-1] - kinetic_energy(fields))


def validate_positive(fields: np.ndarray, gamma: float = GAMMA, context: str = ""):
    where = f" in {context}" if context else ""
    if not np.all(np.isfinite(fields)):
        bad = ["density", "momentum", "energy"][min(2, int(np.argwhere(~np.isfinite(fields))[0][0]))]
        raise StateError(f"non-finite {bad}{where}")
    if np.any(fields[0] <= 0.0):
        raise StateError(f"non-positive density{where}")
    if np.any(pressure(fields, gamma) <= 0.0):
        raise StateError(f"non-positive pressure{where}")


def conserved_from_primitive(rho, velocities, p, gamma: float = GAMMA) -> EulerState:
    """Build an EulerState from (rho, (u[, v]), p); E = p/(gamma-1) + rho*|V|^2/2."""
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise StateError("primitive state requires positive density and pressure")
    comps = [rho]
    ke = np.zeros_like(rho)
    for vel in velocities:
        vel = np.asarray(vel, dtype=float)
        comps.append(rho * vel)
        ke = ke + 0.5 * rho * vel * vel
    comps.append(p / (gamma - 1.0) + ke)
    return EulerState(np.stack(np.broadcast_arrays(*comps)), gamma)


def primitive_from_conserved(state: EulerState):
    """Return (rho, (u[, v]), p); raises StateError on lost positivity."""
    state.validate()
    vels = tuple(state.velocity(a) for a in range(state.ndim))
    return state.density.copy(), vels, state.pressure


# -- fluxes ------------------------------------------------------------------


def scalar_flux(u, kind: str):
    u = np.asarray(u, dtype=float)
    if kind == ADVECTION:
        return u.copy()
    if kind == BURGERS:
        return 0.5 * u * u
    if kind == NONCONVEX:
        return 0.25 * (u * u - 1.0) * (u * u - 4.0)
    raise ValueError(f"unknown scalar flux {kind!r}")


def scalar_wave_speed(u, kind: str):
    """|f'(u)|, the local characteristic speed of the scalar law."""
    u = np.asarray(u, dtype=float)
    if kind == ADVECTION:
        return np.ones_like(u)
    if kind == BURGERS:
        return np.abs(u)
    if kind == NONCONVEX:
        return np.abs(0.5 * u * (2.0 * u * u - 5.0))
    raise ValueError(f"unknown scalar flux {kind!r}")


def euler_flux_arrays(fields: np.ndarray, gamma: float, axis: int) -> np.ndarray:
    """Euler flux along one spatial axis for stacked conserved fields."""
    rho = fields[0]
    vel = fields[1 + axis] / rho
    p = pressure(fields, gamma)
    flux = np.empty_like(fields)
    flux[0] = fields[1 + axis]
    for comp in range(1, fields.shape[0] - 1):
        flux[comp] = fields[comp] * vel
    flux[1 + axis] += p
    flux[-1] = vel * (fields[-1] + p)
    return flux


def euler_flux_1d(state: EulerState) -> np.ndarray:
    """(rho*u, rho*u^2 + p, u*(E + p)) for a 1D state."""
    if state.ndim != 1:
        raise ValueError("euler_flux_1d expects a 1D state")
    state.validate()
    return euler_flux_arrays(state.fields, state.gamma, 0)


def euler_flux_2d(state: EulerState, axis: int) -> np.ndarray:
    """Flux column along the given axis of the 2D system."""
    if state.ndim != 2:
        raise ValueError("euler_flux_2d expects a 2D state")
    state.validate()
    return euler_flux_arrays(state.fields, state.gamma, axis)


def normal_shock_downstream(rho, u, p, mach: float, gamma: float = GAMMA, speed=None):
    """Post-shock primitive state for a normal shock of relative Mach `mach`.

    `speed` is the lab-frame shock speed; None means the shock moves at
    mach * c into the given state along +x (u is the pre-shock velocity).
    """
    c = math.sqrt(gamma * p / rho)
    if speed is None:
        speed = u + mach * c
    rho2 = rho * (gamma + 1.0) * mach**2 / ((gamma - 1.0) * mach**2 + 2.0)
    p2 = p * (1.0 + 2.0 * gamma * (mach**2 - 1.0) / (gamma + 1.0))
    u2 = speed + (u - speed) * rho / rho2
    return rho2, u2, p2


# -- reflective walls --------------------------------------------------------


def reflective_flux_signs(ncomp: int, axis: int) -> np.ndarray:
    """Parity of the flux components along `axis` under a slip-wall reflection."""
    signs = -np.ones(ncomp)
    signs[1 + axis] = 1.0  # normal-momentum row carries the even pressure term
    return signs


def apply_reflective_bc(fields: np.ndarray, axis: int, side: str, depth: int) -> np.ndarray:
    """Extend conserved 2D fields past a slip wall by `depth` ghost layers.

    Density, energy and tangential momentum mirror evenly; the wall-normal
    momentum flips sign.  `side` is "low" or "high" along the spatial axis.
    """
    if side not in ("low", "high"):
        raise ValueError("side must be 'low' or 'high'")
    aaxis = 1 + axis  # array axis of the spatial direction
    n = fields.shape[aaxis]
    if depth > n:
        raise ValueError("ghost depth exceeds the field")
    take = [slice(None)] * fields.ndim
    if side == "low":
        take[aaxis] = slice(0, depth)
        ghost = np.flip(fields[tuple(take)], axis=aaxis)
    else:
        take[aaxis] = slice(n - depth, n)
        ghost = np.flip(fields[tuple(take)], axis=aaxis)
    ghost = ghost.copy()
    ghost[1 + axis] = -ghost[1 + axis]
    parts = (ghost, fields) if side == "low" else (fields, ghost)
    return np.concatenate(parts, axis=aaxis)


def reflective_extend_state(fields: np.ndarray, axis: int) -> np.ndarray:
    """Full even doubling of a 2D state across slip walls on both ends of an axis."""
    aaxis = 1 + axis
    ghost = np.flip(fields, axis=aaxis).copy()
    ghost[1 + axis] = -ghost[1 + axis]
    return np.concatenate([fields, ghost], axis=aaxis)


# -- body-fitted cylinder mapping ---------------------------------------------


@dataclass(frozen=True)
class CylinderMapping:
    """Half-annulus around the unit cylinder; computational domain [0,1]^2.

    xi = 0 is the outer inflow arc, xi = 1 the cylinder surface; eta sweeps the
    opening angle.
    """

    radius_x: float = 3.0
    radius_y: float = 6.0
    angle: float = 5.0 * math.pi / 12.0

    def physical_coords(self, xi, eta):
        phi = self.angle * (2.0 * np.asarray(eta) - 1.0)
        xi = np.asarray(xi)
        x = -(self.radius_x - (self.radius_x - 1.0) * xi) * np.cos(phi)
        y = (self.radius_y - (self.radius_y - 1.0) * xi) * np.sin(phi)
        return x, y

    def jacobian_analytic(self, xi, eta):
        """(x_xi, x_eta, y_xi, y_eta) in closed form, for cross-checks."""
        phi = self.angle * (2.0 * np.asarray(eta) - 1.0)
        xi = np.asarray(xi)
        x_xi = (self.radius_x - 1.0) * np.cos(phi)
        x_eta = (self.radius_x - (self.radius_x - 1.0) * xi) * np.sin(phi) * 2.0 * self.angle
        y_xi = -(self.radius_y - 1.0) * np.sin(phi)
        y_eta = (self.radius_y - (self.radius_y - 1.0) * xi) * np.cos(phi) * 2.0 * self.angle
        return x_xi, x_eta, y_xi, y_eta


@dataclass
class MappedGeometry:
    """Discrete metric terms of a smooth mapping on a computational grid.

    Metrics come from the same (optionally windowed) mirror-doubled spectral
    derivative used for the flux divergence, which makes a uniform free stream
    an exact steady state of the transformed equations.
    """

    grid: Grid
    x: np.ndarray
    y: np.ndarray
    x_xi: np.ndarray
    x_eta: np.ndarray
    y_xi: np.ndarray
    y_eta: np.ndarray
    jacobian: np.ndarray
    window: tuple | None = None  # per-axis derivative responses on the doubled grids

    @classmethod
    def build(cls, mapping, grid: Grid, window: tuple | None = None) -> "MappedGeometry":
        xi, eta = grid.mesh()
        x, y = mapping.physical_coords(xi, eta)
        wx = window[0] if window else None
        wy = window[1] if window else None
        x_xi = mirror_derivative_axis(x, grid, 0, wx)
        x_eta = mirror_derivative_axis(x, grid, 1, wy)
        y_xi = mirror_derivative_axis(y, grid, 0, wx)
        y_eta = mirror_derivative_axis(y, grid, 1, wy)
        jac = x_xi * y_eta - x_eta * y_xi
        if np.any(~np.isfinite(jac)) or np.min(np.abs(jac)) < 1e-12 or np.min(jac) * np.max(jac) < 0:
            raise ValueError("mapping is singular on this grid")
        return cls(grid, x, y, x_xi, x_eta, y_xi, y_eta, jac, window)

    def wall_normal(self):
        """Unit normal of xi level sets, proportional to (y_eta, -x_eta)."""
        mag = np.hypot(self.y_eta, self.x_eta)
        return self.y_eta / mag, -self.x_eta / mag


def _wall_reflected_ghost(fields: np.ndarray, geom: MappedGeometry, blend: np.ndarray):
    """Mirror of the state in xi with momentum reflected about the wall tangent.

    `blend` ramps the reflection from full strength at the wall plane to zero
    at the far (wrap) plane so the doubled signal stays jump-free at both ends.
    """
    ghost = np.flip(fields, axis=1).copy()
    nx, ny = geom.wall_normal()
    nx = np.flip(nx, axis=0)
    ny = np.flip(ny, axis=0)
    normal_mom = ghost[1] * nx + ghost[2] * ny
    factor = 2.0 * blend[:, None] * normal_mom
    ghost[1] -= factor * nx
    ghost[2] -= factor * ny
    return ghost


def curvilinear_rhs(
    fields: np.ndarray, geom: MappedGeometry, gamma: float = GAMMA, wall: bool = True
) -> np.ndarray:
    """Strong-conservation Euler right-hand side on a mapped grid.

    xi runs from the inflow arc to the cylinder wall; with ``wall`` the xi
    doubling reflects momentum about the wall tangent, otherwise both xi ends
    are transparent (the configuration of the free-stream preservation check).
    eta ends are transparent (outflow).
    """
    grid = geom.grid
    wx = geom.window[0] if geom.window else None
    wy = geom.window[1] if geom.window else None
    flux_x = euler_flux_arrays(fields, gamma, 0)
    flux_y = euler_flux_arrays(fields, gamma, 1)
    fhat = geom.y_eta * flux_x - geom.x_eta * flux_y
    ghat = -geom.y_xi * flux_x + geom.x_xi * flux_y

    if wall:
        n_xi = grid.points[0]
        blend = 0.5 * (1.0 + np.cos(np.pi * np.arange(n_xi) / (n_xi - 1.0)))
        ghost = _wall_reflected_ghost(fields, geom, blend)
        gflux_x = euler_flux_arrays(ghost, gamma, 0)
        gflux_y = euler_flux_arrays(ghost, gamma, 1)
        fhat_ghost = np.flip(geom.y_eta, 0) * gflux_x - np.flip(geom.x_eta, 0) * gflux_y
        ext = np.concatenate([fhat, fhat_ghost], axis=1)
        doubled = grid.doubled(0)
        from .spectral import derivative_axis, restrict_axis

        dxi = restrict_axis(derivative_axis(ext, doubled, 0, wx), doubled, 0)
    else:
        dxi = mirror_derivative_axis(fhat, grid, 0, wx)
    deta = mirror_derivative_axis(ghat, grid, 1, wy)
    return -(dxi + deta) / geom.jacobian


def mapped_wave_speeds(fields: np.ndarray, geom: MappedGeometry, gamma: float = GAMMA):
    """Max contravariant speed per computational axis, for CFL time steps."""
    rho = fields[0]
    u = fields[1] / rho
    v = fields[2] / rho
    c = sound_speed_clamped(fields, gamma)
    lam_xi = (np.abs(u * geom.y_eta - v * geom.x_eta) + c * np.hypot(geom.y_eta, geom.x_eta)) / np.abs(
        geom.jacobian
    )
    lam_eta = (np.abs(-u * geom.y_xi + v * geom.x_xi) + c * np.hypot(geom.y_xi, geom.x_xi)) / np.abs(
        geom.jacobian
    )
    return float(np.max(lam_xi)), float(np.max(lam_eta))


# -- benchmark catalog ---------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    """A benchmark problem and all constants needed to run it."""

    example: int
    case: str
    system: str  # "scalar" | "euler" | "euler_mapped"
    grid: Grid
    bc: tuple[str, ...]
    t_final: float
    filter_ratio: float
    dt: float | None = None
    cfl: float | None = None
    flux_kind: str | None = None
    constants: dict = field(default_factory=dict)
    clamp: tuple | None = None  # (axis, cells, conserved column) imposed each stage
    postprocess: tuple | None = None  # ("lagrange", order) or ("local", order, window)
    mapping: CylinderMapping | None = None
    sensor_threshold: float | None = None  # None: the sensor's global default
    derivative_window: float | None = 3.2  # flux-derivative window; None disables
    prefilter_initial: bool = False  # filter the sampled initial data once
    positivity_patience: float | None = None  # None: 5% of the final time
    gamma: float = GAMMA

    @property
    def ncomp(self) -> int:
        if self.system == "scalar":
            return 1
        return self.grid.ndim + 2


_POST_SHOCK_M3 = (3.85714, 2.629369, 10.33333)  # printed benchmark triple

# Filter ratios keyed by (example, case); cases double as resolution labels.
_RATIO_TABLE = {
    (1, "n128"): 0.6, (1, "n256"): 0.8,
    (2, "n128"): 0.6, (2, "n256"): 0.8,
    (3, "n129"): 0.7, (3, "n257"): 0.8,
    (4, "n129"): 0.6, (4, "n257"): 0.6,
    (5, "n65"): 0.8, (5, "n129"): 0.8,
    (6, "lax"): 0.95, (6, "sod"): 1.1,
    (7, "k13"): 2.0, (7, "k26"): 2.0, (7, "k39"): 2.1, (7, "k52"): 2.1,
    (8, "n129"): 2.0, (8, "n257"): 2.1, (8, "n2049"): 2.1,
    (9, ""): 2.1,
    (10, ""): 2.8,
    (11, "eta1"): 3.2, (11, "eta05"): 2.8,
    (12, ""): 1.2,
}

_DEFAULT_CASE = {1: "n128", 2: "n128", 3: "n129", 4: "n129", 5: "n129",
                 6: "sod", 7: "k13", 8: "n129", 9: "", 10: "", 11: "eta1", 12: ""}

_SHOCK_MACH = 3.0


def default_ratio(example: int, case: str, n: int | None = None) -> float:
    if (example, case) in _RATIO_TABLE:
        return _RATIO_TABLE[(example, case)]
    # n-keyed examples: pick the tabulated row with the nearest point count
    rows = [(key[1], r) for key, r in _RATIO_TABLE.items() if key[0] == example and key[1].startswith("n")]
    if rows and n is not None:
        return min(rows, key=lambda kr: abs(int(kr[0][1:]) - n))[1]
    return _RATIO_TABLE[(example, _DEFAULT_CASE[example])]


def problem(example: int, case: str | None = None, n: int | None = None,
            n_y: int | None = None) -> ProblemSpec:
    """Benchmark setup with catalog defaults; `n` (and `n_y`) override resolution."""
    if example not in range(1, 13):
        raise ValueError(f"unknown example id {example}")
    if case is None:
        case = _DEFAULT_CASE[example]
        if n is not None and example in (1, 2, 3, 4, 5, 8):
            case = f"n{n}"

    if example in (1, 2):
        # long-time transport of marginally resolved features: exact spectral
        # phase speeds matter, so no derivative window, and the sensor must
        # ignore the percent-level TV swing of features crossing cells
        points = n or int(case[1:])
        grid = Grid.line(points, -1.0, 1.0, periodic=True)
        return ProblemSpec(example, case, "scalar", grid, (BC_PERIODIC,), 8.0,
                           default_ratio(example, case, points), dt=0.001,
                           flux_kind=ADVECTION, constants={"speed": 1.0},
                           postprocess=None, sensor_threshold=1.05,
                           derivative_window=None)
    if example == 3:
        # a clean shock tail needs the cleanup after every cycle in which the
        # total variation grew at all
        points = n or int(case[1:])
        grid = Grid.line(points, -2.0, 2.0, periodic=False)
        return ProblemSpec(example, case, "scalar", grid, (BC_OPEN,), 2.0,
                           default_ratio(example, case, points), dt=0.005,
                           flux_kind=BURGERS, constants={"left": 1.0, "right": 0.0},
                           postprocess=("lagrange", 4), sensor_threshold=1.0 + 1e-9)
    if example == 4:
        # expansion waves only need the startup cleanup; a loose TV ratio keeps
        # the fan corners sharp once the initial jump has been smoothed
        points = n or int(case[1:])
        grid = Grid.line(points, -1.0, 3.0, periodic=False)
        return ProblemSpec(example, case, "scalar", grid, (BC_OPEN,), 2.0,
                           default_ratio(example, case, points), dt=0.005,
                           flux_kind=BURGERS, constants={"left": 0.0, "right": 1.0},
                           postprocess=("lagrange", 4), sensor_threshold=1.05)
    if example == 5:
        # the even flux takes equal values on the two initial states, so the
        # sampled step is a spurious discrete equilibrium (flux exactly
        # constant); one initial filter pass breaks the tie and the entropy
        # mechanism takes over
        points = n or int(case[1:])
        grid = Grid.line(points, -1.0, 1.0, periodic=False)
        return ProblemSpec(example, case, "scalar", grid, (BC_OPEN,), 0.04,
                           default_ratio(example, case, points), dt=0.0005,
                           flux_kind=NONCONVEX, constants={"left": -3.0, "right": 3.0},
                           postprocess=("lagrange", 4), prefilter_initial=True)
    if example == 6:
        # the Lax left state moves at u + c ~ 4.0; the span keeps pi*dt*(u+c)/dx
        # inside the RK4 stability interval at the tabulated time step
        points = n or 129
        grid = Grid.line(points, -6.0, 6.0, periodic=False)
        if case == "sod":
            left, right, t_final = (1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 2.0
        elif case == "lax":
            left, right, t_final = (0.445, 0.698, 3.528), (0.5, 0.0, 0.571), 1.5
        else:
            raise ValueError(f"example 6 case must be sod or lax, got {case!r}")
        return ProblemSpec(example, case, "euler", grid, (BC_OPEN,), t_final,
                           default_ratio(6, case), dt=0.02,
                           constants={"left": left, "right": right},
                           postprocess=("lagrange", 4))
    if example == 7:
        # the post-shock inflow at the left boundary is supersonic (M ~ 1.36),
        # so the full state is imposed there
        kappa = float(case[1:])
        points = n or {"k13": 513, "k26": 1025, "k39": 2049, "k52": 2049}[case]
        grid = Grid.line(points, 0.0, 9.0, periodic=False)
        t_final = 8.0 / (_SHOCK_MACH * math.sqrt(GAMMA))  # shock travels 0.5 -> 8.5
        inflow = conserved_from_primitive(
            np.full(1, _POST_SHOCK_M3[0]), (np.full(1, _POST_SHOCK_M3[1]),),
            np.full(1, _POST_SHOCK_M3[2])).fields[:, 0]
        return ProblemSpec(example, case, "euler", grid, (BC_OPEN,), t_final,
                           default_ratio(7, case), cfl=0.125,
                           constants={"eps": 0.01, "kappa": kappa, "x_shock": 0.5,
                                      "post": _POST_SHOCK_M3},
                           postprocess=("local", 2, 16), clamp=(0, 2, tuple(inflow)))
    if example == 8:
        points = n or int(case[1:])
        grid = Grid.line(points, -1.0, 1.0, periodic=False)
        inflow = conserved_from_primitive(
            np.full(1, _POST_SHOCK_M3[0]), (np.full(1, _POST_SHOCK_M3[1]),),
            np.full(1, _POST_SHOCK_M3[2])).fields[:, 0]
        return ProblemSpec(example, case, "euler", grid, (BC_OPEN,), 0.47,
                           default_ratio(8, case, points), cfl=0.25,
                           constants={"eps": 0.2, "kappa": 5.0, "x_shock": -0.8,
                                      "post": _POST_SHOCK_M3}, clamp=(0, 2, tuple(inflow)))
    if example == 9:
        eps, kappa, theta = 0.1, 15.0, math.pi / 6.0
        nx = n or 513
        ny = n_y or 32
        width = 2.0 * math.pi / (kappa * math.sin(theta))
        grid = Grid.box(nx, ny, (0.0, 9.0), (0.0, width), periodic=(False, True))
        rho2, u2, p2 = normal_shock_downstream(1.0, 0.0, 1.0, _SHOCK_MACH)
        t_final = 8.0 / (_SHOCK_MACH * math.sqrt(GAMMA))
        inflow = conserved_from_primitive(
            np.full(1, rho2), (np.full(1, u2), np.zeros(1)), np.full(1, p2)).fields[:, 0]
        return ProblemSpec(example, case, "euler", grid, (BC_OPEN, BC_PERIODIC), t_final,
                           default_ratio(9, case), cfl=0.25,
                           constants={"eps": eps, "kappa": kappa, "theta": theta,
                                      "x_shock": 0.5, "post": (rho2, u2, p2)},
                           clamp=(0, 2, tuple(inflow)))
    if example == 10:
        nx = n or 257
        ny = n_y or 129
        grid = Grid.box(nx, ny, (0.0, 2.0), (0.0, 1.0), periodic=(False, False))
        u1 = 1.1 * math.sqrt(GAMMA)
        rho2, u2, p2 = normal_shock_downstream(1.0, u1, 1.0, 1.1, speed=0.0)
        inflow = conserved_from_primitive(1.0, (u1, 0.0), 1.0).fields
        return ProblemSpec(example, case, "euler", grid, (BC_OPEN, BC_REFLECTIVE), 0.8,
                           default_ratio(10, case), cfl=0.5,
                           constants={"eps": 0.3, "r_c": 0.05, "alpha": 0.204,
                                      "center": (0.25, 0.5), "x_shock": 0.5,
                                      "upstream": (1.0, u1, 0.0, 1.0),
                                      "post": (rho2, u2, p2)},
                           clamp=(0, 2, tuple(inflow)))
    if example == 11:
        points = n or 64
        grid = Grid.box(points, points, (0.0, 10.0), (0.0, 10.0), periodic=(True, True))
        eta = 1.0 if case == "eta1" else 0.5
        cfl = 0.01 if case == "eta1" else 0.5
        t_final = 2.0 if case == "eta1" else 100.0
        # the smooth vortex only needs cleanup when aliasing actually grows;
        # a per-mill TV deadband keeps the spatial-accuracy runs unfiltered
        return ProblemSpec(example, case, "euler", grid, (BC_PERIODIC, BC_PERIODIC),
                           t_final, default_ratio(11, case), cfl=cfl,
                           constants={"strength": 5.0, "decay": eta, "center": (5.0, 5.0),
                                      "free_stream": (1.0, 1.0)},
                           sensor_threshold=1.001)
    # example 12
    nx = n or 65
    ny = n_y or 129
    grid = Grid.box(nx, ny, (0.0, 1.0), (0.0, 1.0), periodic=(False, False))
    mapping = CylinderMapping()
    rho2, u2, p2 = normal_shock_downstream(1.4, 1.0, 1.0, _SHOCK_MACH)
    inflow = conserved_from_primitive(rho2, (u2, 0.0), p2).fields
    # the incident shock crosses roughly a cell per step on this coarse mapped
    # grid and drags a transient sub-atmospheric pocket with it until the bow
    # shock settles; positivity is only meaningful for the settled state
    return ProblemSpec(example, case, "euler_mapped", grid, (BC_WALL_END, BC_OPEN), 4.5,
                       default_ratio(12, case), cfl=0.4,
                       constants={"front": (1.4, 1.0, 0.0, 1.0), "xi_shock": 0.1,
                                  "post": (rho2, u2, p2)},
                       clamp=(0, 2, tuple(inflow)), mapping=mapping,
                       positivity_patience=float("inf"))


# -- initial data --------------------------------------------------------------


def advection_composite_profile(x):
    """Gaussian triplet, square wave, sharp triangle and half ellipse on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    a, z, delta, alpha = 0.5, -0.7, 0.005, 10.0
    beta = math.log(2.0) / (36.0 * delta**2)

    def gauss(xs, center):
        return np.exp(-beta * (xs - center) ** 2)

    def ellipse(xs, center):
        return np.sqrt(np.maximum(1.0 - alpha**2 * (xs - center) ** 2, 0.0))

    u = np.zeros_like(x)
    m = (x >= -0.8) & (x <= -0.6)
    u[m] = (gauss(x[m], z - delta) + gauss(x[m], z + delta) + 4.0 * gauss(x[m], z)) / 6.0
    m = (x >= -0.4) & (x <= -0.2)
    u[m] = 1.0
    m = (x >= 0.0) & (x <= 0.2)
    u[m] = 1.0 - np.abs(10.0 * (x[m] - 0.1))
    m = (x >= 0.4) & (x <= 0.6)
    u[m] = (ellipse(x[m], a - delta) + ellipse(x[m], a + delta) + 4.0 * ellipse(x[m], a)) / 6.0
    return u


def advection_wshape_profile(x):
    """Piecewise-linear W profile with contact discontinuities."""
    x = np.asarray(x, dtype=float)
    conds = [
        (x >= 0.0) & (x <= 0.2),
        (x >= 0.2) & (x <= 0.4),
        (x >= 0.4) & (x <= 0.6),
        (x >= 0.6) & (x <= 0.8),
    ]
    vals = [np.ones_like(x), 4.0 * x - 0.6, -4.0 * x + 2.6, np.ones_like(x)]
    return np.select(conds, vals, default=0.0)


def isentropic_vortex_primitive(x, y, center, strength: float, decay: float,
                                box: float = 10.0, gamma: float = GAMMA):
    """Primitive fields of the translating isentropic vortex on a periodic box.

    Free stream (rho, u, v, p, T) = (1, 1, 1, 1, 1); distances use the minimal
    periodic image so the profile stays smooth across the wrap.
    """
    dx = (np.asarray(x) - center[0] + 0.5 * box) % box - 0.5 * box
    dy = (np.asarray(y) - center[1] + 0.5 * box) % box - 0.5 * box
    s2 = dx * dx + dy * dy
    envelope = np.exp(decay * (1.0 - s2))
    du = -strength / (2.0 * np.pi) * dy * envelope
    dv = strength / (2.0 * np.pi) * dx * envelope
    d_temp = -(gamma - 1.0) * strength**2 / (16.0 * decay * gamma * np.pi**2) * envelope**2
    temp = 1.0 + d_temp
    rho = temp ** (1.0 / (gamma - 1.0))
    p = temp ** (gamma / (gamma - 1.0))
    return rho, 1.0 + du, 1.0 + dv, p


def shock_vortex_perturbation(x, y, center, eps: float, r_c: float, alpha: float,
                              gamma: float = GAMMA):
    """(du, dv, dT) of the compressible vortex seeded upstream of the shock."""
    dx = (np.asarray(x) - center[0]) / r_c
    dy = (np.asarray(y) - center[1]) / r_c
    tau2 = dx * dx + dy * dy
    envelope = np.exp(alpha * (1.0 - tau2))
    du = eps * dy * envelope
    dv = -eps * dx * envelope
    d_temp = -(gamma - 1.0) * eps**2 * envelope**2 / (4.0 * alpha * gamma)
    return du, dv, d_temp


def init_problem(spec: ProblemSpec) -> np.ndarray:
    """Initial conserved fields (ncomp, nx[, ny]) for a benchmark problem."""
    c = spec.constants
    if spec.example in (1, 2):
        sampler = advection_composite_profile if spec.example == 1 else advection_wshape_profile
        return sampler(spec.grid.coordinates(0))[None, :]
    if spec.example in (3, 4, 5):
        x = spec.grid.coordinates(0)
        u = np.where(x <= 0.0, c["left"], c["right"])
        if spec.example == 4:  # x < 0 gets the left value, x >= 0 the right one
            u = np.where(x < 0.0, c["left"], c["right"])
        return u[None, :].astype(float)
    if spec.example == 6:
        x = spec.grid.coordinates(0)
        (rl, ul, pl), (rr, ur, pr) = c["left"], c["right"]
        rho = np.where(x < 0.0, rl, rr)
        vel = np.where(x < 0.0, ul, ur)
        p = np.where(x < 0.0, pl, pr)
        return conserved_from_primitive(rho, (vel,), p, spec.gamma).fields
    if spec.example in (7, 8):
        x = spec.grid.coordinates(0)
        rho2, u2, p2 = c["post"]
        pre = x > c["x_shock"]
        if spec.example == 7:
            rho_pre = np.exp(-c["eps"] * np.sin(c["kappa"] * x))
        else:
            rho_pre = 1.0 + c["eps"] * np.sin(c["kappa"] * np.pi * x)
        rho = np.where(pre, rho_pre, rho2)
        vel = np.where(pre, 0.0, u2)
        p = np.where(pre, 1.0, p2)
        return conserved_from_primitive(rho, (vel,), p, spec.gamma).fields
    if spec.example == 9:
        x, y = spec.grid.mesh()
        rho2, u2, p2 = c["post"]
        pre = x > c["x_shock"]
        wave = np.exp(-c["eps"] * np.sin(c["kappa"] * (x * math.cos(c["theta"])
                                                       + y * math.sin(c["theta"]))))
        rho = np.where(pre, wave, rho2)
        u = np.where(pre, 0.0, u2)
        p = np.where(pre, 1.0, p2)
        return conserved_from_primitive(rho, (u, np.zeros_like(u)), p, spec.gamma).fields
    if spec.example == 10:
        x, y = spec.grid.mesh()
        rho1, u1, v1, p1 = c["upstream"]
        rho2, u2, p2 = c["post"]
        du, dv, d_temp = shock_vortex_perturbation(x, y, c["center"], c["eps"],
                                                   c["r_c"], c["alpha"], spec.gamma)
        upstream = x < c["x_shock"]
        # isentropic perturbation: S constant, so rho = T^(1/(g-1)), p = T^(g/(g-1))
        temp = 1.0 + d_temp
        rho_u = rho1 * temp ** (1.0 / (spec.gamma - 1.0))
        p_u = p1 * temp ** (spec.gamma / (spec.gamma - 1.0))
        rho = np.where(upstream, rho_u, rho2)
        u = np.where(upstream, u1 + du, u2)
        v = np.where(upstream, v1 + dv, 0.0)
        p = np.where(upstream, p_u, p2)
        return conserved_from_primitive(rho, (u, v), p, spec.gamma).fields
    if spec.example == 11:
        x, y = spec.grid.mesh()
        rho, u, v, p = isentropic_vortex_primitive(x, y, c["center"], c["strength"],
                                                   c["decay"], spec.grid.lengths[0],
                                                   spec.gamma)
        return conserved_from_primitive(rho, (u, v), p, spec.gamma).fields
    if spec.example == 12:
        xi, _eta = spec.grid.mesh()
        rho1, u1, v1, p1 = c["front"]
        rho2, u2, p2 = c["post"]
        behind = xi < c["xi_shock"]
        rho = np.where(behind, rho2, rho1)
        u = np.where(behind, u2, u1)
        v = np.full_like(rho, v1)
        p = np.where(behind, p2, p1)
        return conserved_from_primitive(rho, (u, v), p, spec.gamma).fields
    raise ValueError(f"unknown example id {spec.example}")


def sound_speed_clamped(fields: np.ndarray, gamma: float = GAMMA) -> np.ndarray:
    """Sound speed with transient negative-pressure pockets treated as silent."""
    return np.sqrt(gamma * np.maximum(pressure(fields, gamma), 0.0) / fields[0])


def max_wave_speed_per_axis(spec: ProblemSpec, fields: np.ndarray,
                            geometry: MappedGeometry | None = None):
    """Largest signal speed along each axis, used by the CFL time step."""
    if spec.system == "scalar":
        return (float(np.max(scalar_wave_speed(fields[0], spec.flux_kind))),)
    if spec.system == "euler_mapped":
        if geometry is None:
            raise ValueError("mapped problems need a geometry")
        return mapped_wave_speeds(fields, geometry, spec.gamma)
    rho = fields[0]
    cs = sound_speed_clamped(fields, spec.gamma)
    return tuple(
        float(np.max(np.abs(fields[1 + axis] / rho) + cs)) for axis in range(spec.grid.ndim)
    )
