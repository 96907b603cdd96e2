"""Compressor definition: blade rows, annulus, design values, coefficients.

The machine is a 10-stage axial compressor bounded by inlet and exit guide
vanes: 22 blade rows in the order IGV, R1, S1, ..., R10, S10, EGV.  Flow
states live on 24 axial planes: plane 0 is the compressor inlet, plane i is
the outlet of row i-1, and plane 23 is the compressor outlet.  The annulus
(constant casing radius, rising hub) is sized at construction time so the
design-point axial velocity follows a prescribed schedule; those areas are
then frozen as geometry.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from .gas import GasProperties

N_ROWS = 22
N_PLANES = 24
N_STAGES = 10
N_GEOM_PARAMS = 5
N_GEOM_SECTIONS = 8

ROW_KINDS = ("vane", "rotor", "stator")
VARIABLES = ("Pt", "Tt", "Vx", "Vt", "Vr", "rho")
GEOM_PARAM_NAMES = ("inlet_angle", "outlet_angle", "max_thickness", "chord", "pitch")


def row_names():
    names = ["IGV"]
    for i in range(1, N_STAGES + 1):
        names += [f"R{i}", f"S{i}"]
    names.append("EGV")
    return names


def plane_names():
    return ["inlet"] + [f"{r}_out" for r in row_names()] + ["outlet"]


def rotor_row_index(stage):
    """Row index of the rotor of `stage` (1-based stage)."""
    return 2 * stage - 1


def stage_plane_bounds(stage):
    """(inlet plane, outlet plane) of `stage`: rotor inlet to stator outlet."""
    return 2 * stage - 1, 2 * stage + 1


@dataclass
class RowSpec:
    name: str
    kind: str
    blade_count: int
    clearance_mm: float
    roughness_um: float
    work_coeff: float = 0.0      # psi, rotors only
    loss_coeff: float = 0.0      # omega, stators/vanes
    blade_speed: float = 0.0     # U at meanline, m/s, rotors only

    def __post_init__(self):
        if self.kind not in ROW_KINDS:
            raise ConfigError(f"row {self.name}: unknown kind {self.kind!r}")
        if self.kind == "rotor" and self.work_coeff <= 0:
            raise ConfigError(f"rotor {self.name}: work coefficient must be positive")
        if self.kind != "rotor" and self.work_coeff != 0:
            raise ConfigError(f"row {self.name}: work coefficient only on rotors")


@dataclass
class OracleCoefficients:
    """Penalty and flow-structure knobs of the synthetic ground truth.

    Efficiency penalties: `tip_penalty` is the efficiency fraction lost per
    unit increase of clearance/span; `rough_penalty` per decade of Ra over
    design.  Stators convert the same terms into extra loss coefficient
    through `stator_gain`.  The remaining fields shape the synthesized 2D
    structures (wakes, endwall layers, clearance blobs).
    """

    eta_base: float = 0.90
    tip_penalty: float = 0.45
    rough_penalty: float = 0.010
    stator_gain: float = 2.0
    loss_floor: float = 0.25
    wake_depth: float = 0.10
    wake_width: float = 0.08
    blob_gain: float = 3.0
    blob_extent_span: float = 0.06
    blob_extent_theta: float = 0.10
    endwall_delta: float = 0.08
    endwall_exponent: float = 1.0 / 7.0
    radial_velocity_gain: float = 0.5
    flow_coupling: float = 0.15

    def __post_init__(self):
        for name in ("tip_penalty", "rough_penalty", "stator_gain", "blob_gain"):
            if getattr(self, name) < 0:
                raise ConfigError(f"penalty coefficient {name} must be >= 0")

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class CompressorSpec:
    rows: list
    pt_inlet: float
    tt_inlet: float
    mdot_design: float
    design_pr: float
    mach_schedule: np.ndarray     # (24,) design Mach per plane
    r_casing: np.ndarray          # (24,) m
    r_hub: np.ndarray             # (24,) m
    preswirl: float               # stator/IGV outlet swirl as fraction of U
    design_geometry: np.ndarray = field(repr=False)  # (5, 22, 8)

    def __post_init__(self):
        if len(self.rows) != N_ROWS:
            raise ConfigError(f"expected {N_ROWS} rows, got {len(self.rows)}")
        for arr, name in ((self.mach_schedule, "mach_schedule"),
                          (self.r_casing, "r_casing"), (self.r_hub, "r_hub")):
            if len(arr) != N_PLANES:
                raise ConfigError(f"{name} must have {N_PLANES} entries")
        if np.any(self.r_hub <= 0) or np.any(self.r_hub >= self.r_casing):
            raise ConfigError("need 0 < r_hub < r_casing on every plane")
        if self.design_geometry.shape != (N_GEOM_PARAMS, N_ROWS, N_GEOM_SECTIONS):
            raise ConfigError("design_geometry must be (5, 22, 8)")

    @property
    def spans(self):
        return self.r_casing - self.r_hub

    def areas(self):
        return np.pi * (self.r_casing ** 2 - self.r_hub ** 2)

    def plane_blade_count(self, plane):
        """Blade count governing the passage pitch at `plane`."""
        row = max(0, min(plane - 1, N_ROWS - 1))
        return self.rows[row].blade_count

    def design_clearance_ratio(self, row):
        """Design clearance over local span at the row outlet plane."""
        span = self.spans[row + 1]
        return self.rows[row].clearance_mm * 1e-3 / span

    def to_dict(self):
        return {
            "rows": [dict(r.__dict__) for r in self.rows],
            "pt_inlet": self.pt_inlet,
            "tt_inlet": self.tt_inlet,
            "mdot_design": self.mdot_design,
            "design_pr": self.design_pr,
            "mach_schedule": self.mach_schedule.tolist(),
            "r_casing": self.r_casing.tolist(),
            "r_hub": self.r_hub.tolist(),
            "preswirl": self.preswirl,
            "design_geometry": self.design_geometry.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(rows=[RowSpec(**r) for r in d["rows"]],
                   pt_inlet=float(d["pt_inlet"]), tt_inlet=float(d["tt_inlet"]),
                   mdot_design=float(d["mdot_design"]),
                   design_pr=float(d["design_pr"]),
                   mach_schedule=np.asarray(d["mach_schedule"], float),
                   r_casing=np.asarray(d["r_casing"], float),
                   r_hub=np.asarray(d["r_hub"], float),
                   preswirl=float(d["preswirl"]),
                   design_geometry=np.asarray(d["design_geometry"], float))


def _design_geometry():
    """Plausible blade design parameters at 8 span sections per row."""
    span = np.linspace(0.0, 1.0, N_GEOM_SECTIONS)
    geom = np.zeros((N_GEOM_PARAMS, N_ROWS, N_GEOM_SECTIONS))
    for r in range(N_ROWS):
        stage_frac = r / (N_ROWS - 1.0)
        rotor = r % 2 == 1 and r < N_ROWS - 1
        inlet = (55.0 if rotor else 35.0) - 12.0 * stage_frac + 10.0 * span
        outlet = inlet - (25.0 if rotor else 30.0) + 4.0 * span
        thick = (6.0 - 3.5 * stage_frac) * (1.1 - 0.4 * span)
        chord = (70.0 - 38.0 * stage_frac) * (1.0 + 0.15 * span)
        pitch = chord * (0.75 + 0.1 * span)
        geom[0, r] = inlet
        geom[1, r] = outlet
        geom[2, r] = thick
        geom[3, r] = chord
        geom[4, r] = pitch
    return geom


def default_compressor(gas=None):
    """Ten-stage machine sized so the design point closes exactly.

    Hub radii are derived from continuity at the design state (Mach
    schedule for density, a linearly falling axial-velocity schedule), so
    the frozen annulus reproduces the design axial velocities.
    """
    gas = gas or GasProperties()
    pt0, tt0 = 101325.0, 288.15
    mach = np.linspace(0.55, 0.30, N_PLANES)
    vx_target = np.linspace(190.0, 150.0, N_PLANES)
    r_casing = np.full(N_PLANES, 0.40)

    names = row_names()
    rows = []
    for i, name in enumerate(names):
        stage_frac = max(0, i - 1) / (N_ROWS - 2.0)
        if name == "IGV":
            rows.append(RowSpec(name, "vane", 41, 0.90, 1.6, loss_coeff=0.020))
        elif name == "EGV":
            rows.append(RowSpec(name, "vane", 97, 0.55, 1.6, loss_coeff=0.030))
        elif name.startswith("R"):
            stage = int(name[1:])
            rows.append(RowSpec(
                name, "rotor", int(round(29 + 4.4 * (stage - 1))),
                0.90 - 0.040 * (stage - 1), 1.6,
                work_coeff=0.36 - 0.006 * (stage - 1),
                blade_speed=352.0 - 7.5 * (stage - 1)))
        else:
            stage = int(name[1:])
            rows.append(RowSpec(
                name, "stator", int(round(42 + 4.8 * (stage - 1))),
                0.80 - 0.033 * (stage - 1), 1.6,
                loss_coeff=0.040 + 0.002 * abs(stage - 5) / 5.0))

    # design recurrence for Pt/Tt with base efficiencies, then areas
    coeffs = OracleCoefficients()
    pt = np.empty(N_PLANES)
    tt = np.empty(N_PLANES)
    pt[0], tt[0] = pt0, tt0
    for i, row in enumerate(rows):
        p = i + 1
        if row.kind == "rotor":
            dtt = row.work_coeff * row.blade_speed ** 2 / gas.cp
            tt[p] = tt[p - 1] + dtt
            tr = tt[p] / tt[p - 1]
            pt[p] = pt[p - 1] * tr ** (gas.gamma * coeffs.eta_base / (gas.gamma - 1.0))
        else:
            tt[p] = tt[p - 1]
            ps, _, _ = gas.static_from_total(pt[p - 1], tt[p - 1], mach[p - 1])
            pt[p] = pt[p - 1] - row.loss_coeff * (pt[p - 1] - ps)
    pt[N_PLANES - 1] = pt[N_PLANES - 2]
    tt[N_PLANES - 1] = tt[N_PLANES - 2]

    _, _, rho0 = gas.static_from_total(pt0, tt0, mach[0])
    area0 = 0.30
    mdot = rho0 * vx_target[0] * area0
    r_hub = np.empty(N_PLANES)
    for p in range(N_PLANES):
        _, _, rho = gas.static_from_total(pt[p], tt[p], mach[p])
        area = mdot / (rho * vx_target[p])
        hub_sq = r_casing[p] ** 2 - area / np.pi
        if hub_sq <= 0:
            raise ConfigError(f"annulus sizing failed at plane {p}")
        r_hub[p] = np.sqrt(hub_sq)

    return CompressorSpec(rows=rows, pt_inlet=pt0, tt_inlet=tt0,
                          mdot_design=mdot, design_pr=float(pt[-1] / pt[0]),
                          mach_schedule=mach, r_casing=r_casing, r_hub=r_hub,
                          preswirl=0.15, design_geometry=_design_geometry())


def oracle_config_dict(spec, coeffs, gas):
    return {"compressor": spec.to_dict(), "coefficients": coeffs.to_dict(),
            "gas": gas.to_dict(), "schema_version": 1}


def oracle_config_hash(spec, coeffs, gas):
    blob = json.dumps(oracle_config_dict(spec, coeffs, gas), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def save_oracle_config(path, spec, coeffs, gas):
    with open(path, "w") as f:
        json.dump(oracle_config_dict(spec, coeffs, gas), f, indent=1, sort_keys=True)


def load_oracle_config(path):
    from ..errors import DataError
    try:
        with open(path) as f:
            d = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read oracle config {path}: {e}") from e
    if d.get("schema_version") != 1:
        raise DataError(f"unknown oracle config schema {d.get('schema_version')!r}")
    return (CompressorSpec.from_dict(d["compressor"]),
            OracleCoefficients.from_dict(d["coefficients"]),
            GasProperties.from_dict(d["gas"]))
