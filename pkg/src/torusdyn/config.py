"""Flat key=value configs with section headers, and small file formats.

Lagrangians are described by a [lagrangian] section (dim, integrator, dt)
plus Fourier coefficient tables in [potential.cos], [potential.sin] and
[oneform.<i>.cos]/[oneform.<i>.sin] sections, keys being comma-separated
integer mode indices.  Canal experiments add a [canal] section whose core
polyline lives inline or in a CSV file (one vertex per row, optional
trailing integer wind columns).  Parsing and serialization round-trip.
"""

import configparser
import io

import numpy as np

from .fields import FourierSeries, OneForm
from .lagrangian import MechanicalLagrangian
from .perturbation import CanalExperimentConfig, CanalPotential


def _parse(text):
    cp = configparser.ConfigParser()
    cp.optionxform = str   # keep key case and commas untouched
    cp.read_string(text)
    return cp


def _mode_key(key, dim):
    parts = [int(p) for p in key.replace(" ", "").split(",")]
    if len(parts) != dim:
        raise ValueError(f"mode index {key!r} has {len(parts)} entries, expected {dim}")
    return tuple(parts)


def _coeff_section(cp, name, dim):
    if not cp.has_section(name):
        return {}
    return {_mode_key(k, dim): float(v) for k, v in cp.items(name)}


def parse_lagrangian(text):
    """(MechanicalLagrangian, meta) from config text; meta holds integrator/dt."""
    cp = _parse(text)
    if not cp.has_section("lagrangian"):
        raise ValueError("missing [lagrangian] section")
    dim = cp.getint("lagrangian", "dim")
    potential = FourierSeries(dim, _coeff_section(cp, "potential.cos", dim),
                              _coeff_section(cp, "potential.sin", dim))
    components = []
    any_oneform = False
    for i in range(1, dim + 1):
        cos = _coeff_section(cp, f"oneform.{i}.cos", dim)
        sin = _coeff_section(cp, f"oneform.{i}.sin", dim)
        any_oneform = any_oneform or cos or sin
        components.append(FourierSeries(dim, cos, sin))
    oneform = OneForm(components) if any_oneform else None
    meta = {
        "integrator": cp.get("lagrangian", "integrator", fallback=None),
        "dt": cp.getfloat("lagrangian", "dt", fallback=1e-3),
    }
    return MechanicalLagrangian(dim, potential, oneform), meta


def _fmt_mode(mode):
    return ",".join(str(i) for i in mode)


def serialize_lagrangian(L: MechanicalLagrangian, meta=None):
    meta = meta or {}
    out = io.StringIO()
    out.write("[lagrangian]\n")
    out.write(f"dim = {L.dim}\n")
    if meta.get("integrator"):
        out.write(f"integrator = {meta['integrator']}\n")
    out.write(f"dt = {meta.get('dt', 1e-3)!r}\n")

    def write_series(name, series):
        for label, table in (("cos", series.cos), ("sin", series.sin)):
            if table:
                out.write(f"\n[{name}.{label}]\n")
                for mode in sorted(table):
                    out.write(f"{_fmt_mode(mode)} = {table[mode]!r}\n")

    write_series("potential", L.potential)
    if not L.oneform.is_zero():
        for i, comp in enumerate(L.oneform.components, start=1):
            write_series(f"oneform.{i}", comp)
    return out.getvalue()


def parse_polyline_csv(text):
    """Vertex rows of coordinates; a header `x1[,x2][,w1[,w2]]` may add
    per-segment integer wind columns.  Without a header all columns are
    coordinates and winds default to zero."""
    lines = [ln.strip() for ln in text.strip().splitlines()
             if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValueError("empty polyline")
    n_winds = 0
    if lines[0][0].isalpha():
        cols = [c.strip() for c in lines[0].split(",")]
        n_winds = sum(c.startswith("w") for c in cols)
        dim = len(cols) - n_winds
        lines = lines[1:]
    else:
        dim = len(lines[0].split(","))
    verts, winds = [], []
    for ln in lines:
        vals = [float(p) for p in ln.split(",")]
        if len(vals) != dim + n_winds:
            raise ValueError(f"row {ln!r} does not match the {dim}+{n_winds} column layout")
        verts.append(vals[:dim])
        winds.append([int(v) for v in vals[dim:]])
    wind_arr = np.array(winds, dtype=int) if n_winds else None
    return np.array(verts), wind_arr


def format_polyline_csv(verts, winds=None):
    verts = np.atleast_2d(verts)
    dim = verts.shape[1]
    header = ",".join(f"x{i+1}" for i in range(dim))
    if winds is not None:
        header += "," + ",".join(f"w{i+1}" for i in range(dim))
    lines = [header]
    for i, v in enumerate(verts):
        row = ",".join(repr(float(c)) for c in v)
        if winds is not None:
            row += "," + ",".join(str(int(c)) for c in winds[i])
        lines.append(row)
    return "\n".join(lines) + "\n"


def parse_canal_experiment(text, base_dir="."):
    """(MechanicalLagrangian, CanalPotential, CanalExperimentConfig) from config."""
    import os

    cp = _parse(text)
    L, meta = parse_lagrangian(text)
    if not cp.has_section("canal"):
        raise ValueError("missing [canal] section")
    sec = cp["canal"]
    if "core_file" in sec:
        with open(os.path.join(base_dir, sec["core_file"])) as fh:
            verts, winds = parse_polyline_csv(fh.read())
    elif "core" in sec:
        verts, winds = parse_polyline_csv(sec["core"].replace(";", "\n"))
    else:
        raise ValueError("canal needs `core` (inline) or `core_file` (CSV path)")
    canal = CanalPotential(
        verts, eps=float(sec["eps"]), k=int(sec.get("k", 2)),
        plateau=float(sec["plateau"]) if sec.get("plateau") else None,
        winds=winds)
    econf = CanalExperimentConfig(
        tolerance=float(sec.get("tolerance", 2e-2)),
        seed=int(sec.get("seed", 0)),
        n_random_loops=int(sec.get("n_random_loops", 300)))
    return L, canal, econf


def round_trips(text):
    """parse -> serialize -> parse reaches a fixpoint for Lagrangian configs."""
    L1, meta1 = parse_lagrangian(text)
    s1 = serialize_lagrangian(L1, meta1)
    L2, meta2 = parse_lagrangian(s1)
    s2 = serialize_lagrangian(L2, meta2)
    return s1 == s2
