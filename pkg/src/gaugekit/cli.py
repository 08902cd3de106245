"""Batch front end: ``gaugekit CONFIG.json``.

A config is a flat JSON object with ``cmd`` (the subcommand), ``output``
(result file path), optional ``format`` (``json`` or ``csv``), optional
``seed`` and the subcommand parameters.  Unknown keys are rejected.  The
result file is written only on success; a one-line human summary goes to
stdout and error payloads (JSON) go to stderr.

Exit status: 0 success, 2 numerical-tolerance failure, 3 config error.
``GAUGEKIT_THREADS`` caps the worker count of subcommands that evaluate
independent jobs (seeds, index tables); results never depend on it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import chern, chern_simons as cs, degree as deg, dirac, group, holonomy as hol, lattice, sw
from . import gauge_field as gf
from .errors import ConfigError, GaugekitError, InputError, NotConverged, NumericalError

__all__ = ["run", "main", "emit_plot_data", "SUBCOMMANDS", "OP_COVERAGE", "config_schema"]

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 2, 3
OUTPUT_VERSION = 1


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def worker_count() -> int:
    raw = os.environ.get("GAUGEKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"GAUGEKIT_THREADS must be an integer, got {raw!r}")


def _ordered_map(fn, items):
    """``map`` over a thread pool capped by ``GAUGEKIT_THREADS``; result order is input order."""
    items = list(items)
    n = min(worker_count(), max(1, len(items)))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def emit_plot_data(series, path=None, header=("x", "y")) -> str:
    """Write rows ``(x, y[, extra...])`` as CSV with a header; returns the text.

    Floats are written with ``repr`` so files round-trip exactly.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in series:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write plot data to {path}: {exc}") from exc
    return text


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# --------------------------------------------------------------------------
# schemas
# --------------------------------------------------------------------------

_INT = {"type": "integer"}
_NUM = {"type": "number"}
_POS_INT = {"type": "integer", "minimum": 1}
_INT_LIST = {"type": "array", "items": {"type": "integer"}}
_NUM_LIST = {"type": "array", "items": {"type": "number"}}
_ETA = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_GRID = {"type": "array", "items": {"type": "integer", "minimum": 4}, "minItems": 3, "maxItems": 3}
_GROUP = {"enum": ["U1", "SU2"]}
_PRESENTATION = {
    "type": "object",
    "properties": {"generators": _POS_INT, "relators": {"type": "array", "items": _INT_LIST}},
    "required": ["generators"],
    "additionalProperties": False,
}
_FORM_PRESET = {"enum": ["zero", "lambda-theta", "random"]}
_MAP_PRESET = {"enum": ["id-map", "const", "square-map"]}

PARAMS = {
    "chern-c1": {"N": _POS_INT, "flux": _INT, "flux2": _INT, "k1": _INT, "k2": _INT, "gauge_seed": _INT},
    "chern-c2": {"N": _POS_INT, **{k: _INT for k in ("m12", "m13", "m14", "m23", "m24", "m34")}},
    "hopf": {"N": _POS_INT, "tol": _NUM},
    "cs-value": {"preset": _FORM_PRESET, "lambda": _NUM, "amplitude": _NUM, "grid": _GRID, "h": _NUM},
    "cs-shift": {"preset": _FORM_PRESET, "lambda": _NUM, "amplitude": _NUM, "map": _MAP_PRESET, "grid": _GRID},
    "map-degree": {"map": _MAP_PRESET, "grid": _GRID},
    "repvar-solve": {"genus": _POS_INT, "presentation": _PRESENTATION, "group": _GROUP, "seeds": _POS_INT,
                     "tol": _NUM, "max_iter": _POS_INT},
    "repvar-dim": {"genus": _POS_INT, "presentation": _PRESENTATION, "group": _GROUP, "seeds": _POS_INT,
                   "tol": _NUM, "tol_rank": _NUM},
    "holonomy": {"dim": _INT, "N": _POS_INT, "group": _GROUP, "base": _INT_LIST},
    "flow": {"dim": _INT, "N": _POS_INT, "group": _GROUP, "roughness": _NUM, "max_steps": _POS_INT,
             "step_size": _NUM, "tol": _NUM},
    "dirac-spectrum": {"N": _POS_INT, "d": _INT, "r": _NUM, "k": _POS_INT},
    "dirac-index": {"sizes": _INT_LIST, "fluxes": _INT_LIST, "wilson": _NUM_LIST},
    "weitzenboeck": {"sizes": _INT_LIST, "d": _INT},
    "sw-check": {"N": _POS_INT, "eta": _ETA, "psi_scale": _NUM, "link_scale": _NUM, "h": _NUM},
    "sw-descent": {"N": _POS_INT, "eta": _ETA, "psi_scale": _NUM, "link_scale": _NUM, "max_steps": _POS_INT,
                   "tol": _NUM},
    "sw-dim": {"c1sq": _INT, "chi": _INT, "sigma": _INT},
    "degree": {"map": {"enum": sorted(deg.BUILTIN_MAPS)}, "polynomial": {"type": "object"}, "y": _NUM_LIST,
               "ys": {"type": "array", "items": _NUM_LIST}, "grid_density": _POS_INT,
               "family": {"enum": ["cubic-family", "rotation", "constant"]}, "ts": _NUM_LIST},
}
REQUIRED = {"sw-dim": ["c1sq", "chi", "sigma"]}
SUBCOMMANDS = tuple(PARAMS)


def config_schema(cmd: str) -> dict:
    props = {
        "cmd": {"const": cmd},
        "output": {"type": "string", "minLength": 1},
        "format": {"enum": ["json", "csv"]},
        "seed": _INT,
        **PARAMS[cmd],
    }
    return {
        "type": "object",
        "properties": props,
        "required": ["cmd", "output"] + REQUIRED.get(cmd, []),
        "additionalProperties": False,
    }


def validate_config(config) -> None:
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    cmd = config.get("cmd")
    if cmd not in PARAMS:
        raise ConfigError(f"unknown subcommand {cmd!r}; choose from {', '.join(SUBCOMMANDS)}")
    try:
        jsonschema.validate(config, config_schema(cmd))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None


# --------------------------------------------------------------------------
# subcommands; each returns (result dict, summary line)
# --------------------------------------------------------------------------

def _cmd_chern_c1(cfg):
    N = cfg.get("N", 8)
    lat = lattice.build_torus(2, (N, N))
    field = gf.constant_flux_t2(N, cfg.get("flux", 1))
    if "flux2" in cfg:
        field = chern.combine_u1(field, gf.constant_flux_t2(N, cfg["flux2"]), cfg.get("k1", 1), cfg.get("k2", 1))
    if "gauge_seed" in cfg:
        field = gf.apply_gauge(field, gf.random_gauge(lat, "U1", cfg["gauge_seed"]))
    rep = chern.c1_lattice(field)
    return rep.to_dict(), f"c1 = {rep.rounded} (raw {rep.raw!r}, residual {rep.residual:.2e})"


def _cmd_chern_c2(cfg):
    m = chern.flux_matrix(*(cfg.get(k, 0) for k in ("m12", "m13", "m14", "m23", "m24", "m34")))
    rep = chern.c2_abelian_t4(m, cfg.get("N", 4))
    out = rep.to_dict()
    out["oracle"] = chern.c2_oracle(m)
    return out, f"c2 = {rep.rounded} (oracle {out['oracle']}, residual {rep.residual:.2e})"


def _cmd_hopf(cfg):
    integral, rep = chern.hopf_curvature_integral(cfg.get("N", 256), tol=cfg.get("tol", 1e-4))
    out = {"integral": [integral.real, integral.imag], "error": abs(integral - 2j * math.pi), **rep.to_dict()}
    return out, f"integral = {integral.imag!r} i, c1 = {rep.rounded}"


def _grid(cfg):
    return cs.S3Grid(*cfg.get("grid", [24, 48, 48]))


def _form(cfg, grid):
    preset = cfg.get("preset", "lambda-theta")
    if preset == "zero":
        return cs.zero_form(grid)
    if preset == "lambda-theta":
        return cs.lambda_theta(grid, cfg.get("lambda", 0.5))
    return cs.random_form(grid, cfg.get("seed", 0), cfg.get("amplitude", 0.1))


def _map(cfg, grid):
    name = cfg.get("map", "id-map")
    if name == "id-map":
        return cs.identity_map(grid)
    if name == "square-map":
        return cs.square_map(grid)
    rng = np.random.default_rng(cfg.get("seed", 0))
    return cs.constant_map(grid, rng.normal(size=4))


def _cmd_cs_value(cfg):
    grid = _grid(cfg)
    A = _form(cfg, grid)
    value = cs.cs_value(A)
    F = cs.curvature_form(A)
    a = cs.random_form(grid, cfg.get("seed", 0) + 1, 1.0)
    fd, pairing = cs.cs_gradient_check(A, a, cfg.get("h", 1e-4))
    out = {"cs_value": value, "curvature_max": float(np.max(np.linalg.norm(F, axis=-1))),
           "gradient_fd": fd, "gradient_pairing": pairing}
    return out, f"cs = {value!r}; gradient fd {fd!r} vs pairing {pairing!r}"


def _cmd_cs_shift(cfg):
    grid = _grid(cfg)
    A = _form(cfg, grid)
    g = _map(cfg, grid)
    before, after = cs.cs_value(A), cs.cs_value(cs.gauge_act(A, g))
    out = {"cs_before": before, "cs_after": after, "shift": after - before}
    return out, f"cs shift = {after - before!r}"


def _cmd_map_degree(cfg):
    grid = _grid(cfg)
    rep = cs.map_degree(_map(cfg, grid))
    return rep.to_dict(), f"degree = {rep.rounded} (raw {rep.raw!r})"


def _presentation(cfg):
    if "presentation" in cfg:
        return hol.PresentedGroup.from_dict(cfg["presentation"])
    return hol.surface_group(cfg.get("genus", 2))


def _solve_all(cfg, G):
    seed0 = cfg.get("seed", 0)
    tol = cfg.get("tol", 1e-10)

    def job(s):
        try:
            rho = hol.solve_representation(G, cfg.get("group", "SU2"), s, tol=tol, max_iter=cfg.get("max_iter", 200))
            return s, rho, None
        except NotConverged as exc:
            return s, None, exc.residual

    return _ordered_map(job, range(seed0, seed0 + cfg.get("seeds", 20)))


def _cmd_repvar_solve(cfg):
    G = _presentation(cfg)
    rows = []
    for s, rho, res in _solve_all(cfg, G):
        if rho is None:
            rows.append({"seed": s, "converged": False, "residual": res})
        else:
            rows.append({"seed": s, "converged": True, "residual": math.sqrt(hol.relator_residual(G, rho)),
                         "point": rho.to_dict(), "invariants": rho.invariants()})
    n_ok = sum(r["converged"] for r in rows)
    return {"presentation": G.to_dict(), "solutions": rows, "converged": n_ok}, f"{n_ok}/{len(rows)} seeds converged"


def _cmd_repvar_dim(cfg):
    G = _presentation(cfg)
    rows = []
    for s, rho, res in _solve_all(cfg, G):
        if rho is None:
            rows.append({"seed": s, "converged": False, "residual": res})
            continue
        dim = hol.local_dimension(G, rho, tol_rank=cfg.get("tol_rank"))
        rows.append({"seed": s, "converged": True, "dimension": dim})
    dims = sorted({r["dimension"] for r in rows if r["converged"]})
    return {"presentation": G.to_dict(), "points": rows, "dimensions": dims}, f"local dimensions {dims}"


def _cmd_holonomy(cfg):
    d, N, grp = cfg.get("dim", 2), cfg.get("N", 4), cfg.get("group", "SU2")
    lat = lattice.build_torus(d, (N,) * d)
    rng = np.random.default_rng(cfg.get("seed", 0))
    if grp == "U1":
        hs = [group.U1(t) for t in rng.uniform(-math.pi, math.pi, size=d)]
        args = [group.u1_principal_arg(h.value) for h in hs]
    else:
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        algs = [group.Su2Alg(t * axis) for t in rng.uniform(-2.5, 2.5, size=d)]
        hs = [group.su2_exp(x) for x in algs]
        args = [group.trace_square(group.su2_log(h)) for h in hs]
    field = hol.field_from_representation(lat, grp, hs)
    rep = hol.monodromy_torus(field, base=cfg.get("base"))
    recovered = max(h.distance(r) for h, r in zip(hs, rep.holonomies))
    # the plaquette loop transports to the plaquette holonomy
    p = lat.nplaquettes - 1
    edges = lattice.plaquette_boundary(lat, p)
    loop = hol.parallel_transport(field, lattice.LatticePath(edges[0][0], [s for _, s in edges]))
    plaq = gf.plaquette_holonomy(field, p)
    out = {**rep.to_dict(), "recovery_error": recovered, "plaquette_mismatch": loop.distance(plaq),
           "generator_invariants": args}
    return out, f"holonomies recovered to {recovered:.1e}"


def _cmd_flow(cfg):
    d, N, grp = cfg.get("dim", 2), cfg.get("N", 4), cfg.get("group", "SU2")
    lat = lattice.build_torus(d, (N,) * d)
    field = gf.random_field(lat, grp, cfg.get("seed", 0), cfg.get("roughness", 0.5))
    e0 = gf.wilson_energy(field)
    flat, history = gf.flow_to_flat(field, cfg.get("max_steps", 2000), cfg.get("step_size", 0.1), cfg.get("tol", 1e-10))
    bianchi = None
    if d >= 3 and grp == "U1":
        # abelian Bianchi identity on the first cube: signed face angles sum to 0 mod 2 pi
        faces = lattice.cube_faces(lat, 0)
        total = sum(s * gf.plaquette_holonomy(flat, q).angle for q, s in faces)
        bianchi = abs(float(group.wrap_angle(total)))
    out = {"energy_initial": e0, "energy_final": gf.wilson_energy(flat), "steps": len(history) - 1,
           "bianchi_first_cube": bianchi,
           "series": {"header": ["step", "energy"], "rows": [[i, e] for i, e in enumerate(history)]}}
    return out, f"flowed from {e0:.3e} to {out['energy_final']:.3e} in {out['steps']} steps"


def _cmd_dirac_spectrum(cfg):
    op = dirac.build_dirac_t2(cfg.get("N", 12), cfg.get("d", 1), cfg.get("r", 0.5))
    rep = dirac.spectrum(op, cfg.get("k"))
    rows = [[k, float(m), float(c)] for k, (m, c) in enumerate(zip(rep.magnitudes, rep.chiralities))]
    out = {**rep.to_dict(), "series": {"header": ["mode", "abs_eigenvalue", "chirality"], "rows": rows}}
    return out, f"index = {rep.index} ({rep.zero_modes} near-zero modes, gap ratio {rep.gap_ratio:.1f})"


def _cmd_dirac_index(cfg):
    jobs = [(N, d, r) for N in cfg.get("sizes", [12, 16]) for r in cfg.get("wilson", [0.25, 0.5])
            for d in cfg.get("fluxes", list(range(-3, 4)))]
    reps = _ordered_map(lambda j: dirac.spectrum(dirac.build_dirac_t2(*j)), jobs)
    rows = [{"N": N, "d": d, "r": r, "index": rep.index} for (N, d, r), rep in zip(jobs, reps)]
    ok = all(row["index"] == row["d"] for row in rows)
    return {"table": rows, "index_equals_flux": ok}, f"index = d on all {len(rows)} cases: {ok}"


def _cmd_weitzenboeck(cfg):
    sizes = cfg.get("sizes", [16, 32])
    d = cfg.get("d", 2)
    res = [dirac.weitzenboeck_residual(N, d, cfg.get("seed", 0)) for N in sizes]
    ratios = [b / a if a else None for a, b in zip(res, res[1:])]
    out = {"d": d, "sizes": sizes, "residuals": res, "ratios": ratios,
           "series": {"header": ["N", "residual"], "rows": [[N, r] for N, r in zip(sizes, res)]}}
    return out, f"residuals {res}"


def _cmd_sw_check(cfg):
    N, eta = cfg.get("N", 4), cfg.get("eta", [0.0, 0.0, 0.0])
    seed = cfg.get("seed", 0)
    c = sw.random_config(N, seed, cfg.get("psi_scale", 0.3), cfg.get("link_scale", 0.3), eta)
    g = gf.random_gauge(c.lattice, "U1", seed + 1)
    r0, r1 = sw.sw_map(c), sw.sw_map(sw.gauge_act_sw(c, g))
    phase = np.exp(-1j * np.asarray(g.values))[..., None]
    equiv = max(float(np.max(np.abs(r1.spinor - phase * r0.spinor))), float(np.max(np.abs(r1.form - r0.form))))
    m = sw.mu_matrix(c.psi)
    lhs = np.real(np.einsum("...i,...ij,...j->...", c.psi.conj(), m, c.psi))
    quartic = float(np.max(np.abs(lhs - 0.5 * np.sum(np.abs(c.psi) ** 2, axis=-1) ** 2)))
    coeff_check = float(np.max(np.abs(sw.clifford_form(sw.mu(c.psi)) - m)))
    rng = np.random.default_rng(seed + 2)
    xi = rng.normal(size=c.lattice.sizes)
    delta = (rng.normal(size=c.psi.shape) + 1j * rng.normal(size=c.psi.shape), rng.normal(size=c.links.shape))
    Rxi = sw.gauge_direction(c, xi)
    adjoint = abs(sw.tangent_inner(Rxi, delta) - sw.slice_residual(c, delta, xi))
    exact = sw.constant_solution(N, eta)
    out = {"equivariance_defect": equiv, "quartic_defect": quartic, "mu_coefficient_defect": coeff_check,
           "slice_adjointness_defect": adjoint,
           "deformation_residual_exact": sw.deformation_residual(exact, seed, cfg.get("h", 1e-4))}
    return out, f"equivariance {equiv:.1e}, quartic {quartic:.1e}, adjointness {adjoint:.1e}"


def _cmd_sw_descent(cfg):
    N, eta = cfg.get("N", 4), cfg.get("eta", [0.0, 0.0, 0.0])
    start = sw.perturbed(sw.constant_solution(N, eta), cfg.get("seed", 0),
                         cfg.get("psi_scale", 1e-4), cfg.get("link_scale", 0.05))
    c, history = sw.sw_energy_descent(start, cfg.get("max_steps", 5000), cfg.get("tol", 1e-10))
    report = sw.bound_check(c)
    out = {"bound_check": report, "steps": len(history) - 1,
           "series": {"header": ["step", "energy"], "rows": [[i, e] for i, e in enumerate(history)]}}
    return out, f"E = {history[-1]:.3e} after {len(history) - 1} steps; bound ratio {report['ratio']:.3f}"


def _cmd_sw_dim(cfg):
    res = sw.moduli_dimension(sw.TopologicalData(cfg["c1sq"], cfg["chi"], cfg["sigma"]))
    return {"d": res.dimension, "ind_dirac": res.dirac_index}, f"d = {res.dimension}, ind = {res.dirac_index}"


def _cmd_degree(cfg):
    if "polynomial" in cfg:
        try:
            f = deg.polynomial_map_from_json(cfg["polynomial"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad polynomial table: {exc}") from None
    else:
        f = deg.builtin_map(cfg.get("map", "cubic"))
    dens = cfg.get("grid_density", 16)
    y = cfg.get("y", [0.0] * f.n)
    roots = deg.regular_preimages(f, y, dens)
    out = {"roots": [{"x": list(r.x), "sign": r.sign} for r in roots],
           "degree_z": deg.degree_z(f, y, dens), "degree_mod2": deg.degree_mod2(f, y, dens)}
    if "family" in cfg:
        ys = cfg.get("ys", [y])
        out["homotopy"] = deg.homotopy_invariance_report(
            deg.builtin_family(cfg["family"]), cfg.get("ts", [0.0, 0.25, 0.5, 0.75, 1.0]), ys, dens,
            seed=cfg.get("seed", 0))
    return out, f"deg_Z = {out['degree_z']}, deg_2 = {out['degree_mod2']}"


HANDLERS = {
    "chern-c1": _cmd_chern_c1,
    "chern-c2": _cmd_chern_c2,
    "hopf": _cmd_hopf,
    "cs-value": _cmd_cs_value,
    "cs-shift": _cmd_cs_shift,
    "map-degree": _cmd_map_degree,
    "repvar-solve": _cmd_repvar_solve,
    "repvar-dim": _cmd_repvar_dim,
    "holonomy": _cmd_holonomy,
    "flow": _cmd_flow,
    "dirac-spectrum": _cmd_dirac_spectrum,
    "dirac-index": _cmd_dirac_index,
    "weitzenboeck": _cmd_weitzenboeck,
    "sw-check": _cmd_sw_check,
    "sw-descent": _cmd_sw_descent,
    "sw-dim": _cmd_sw_dim,
    "degree": _cmd_degree,
}

# Each module operation and the one subcommand that exercises it.
OP_COVERAGE = {
    group.su2_exp: "holonomy",
    group.su2_log: "holonomy",
    group.trace_square: "holonomy",
    group.u1_principal_arg: "holonomy",
    lattice.build_torus: "chern-c1",
    lattice.plaquette_boundary: "holonomy",
    lattice.cube_faces: "flow",
    gf.plaquette_holonomy: "holonomy",
    gf.apply_gauge: "chern-c1",
    gf.wilson_energy: "flow",
    gf.flow_to_flat: "flow",
    gf.random_field: "flow",
    chern.c1_lattice: "chern-c1",
    chern.combine_u1: "chern-c1",
    chern.c2_abelian_t4: "chern-c2",
    chern.hopf_curvature_integral: "hopf",
    hol.parallel_transport: "holonomy",
    hol.monodromy_torus: "holonomy",
    hol.solve_representation: "repvar-solve",
    hol.local_dimension: "repvar-dim",
    cs.cs_value: "cs-value",
    cs.curvature_form: "cs-value",
    cs.gauge_act: "cs-shift",
    cs.map_degree: "map-degree",
    cs.cs_gradient_check: "cs-value",
    dirac.build_dirac_t2: "dirac-spectrum",
    dirac.spectrum: "dirac-spectrum",
    dirac.weitzenboeck_residual: "weitzenboeck",
    sw.mu: "sw-check",
    sw.sw_map: "sw-check",
    sw.gauge_act_sw: "sw-check",
    sw.sw_energy_descent: "sw-descent",
    sw.bound_check: "sw-descent",
    sw.deformation_residual: "sw-check",
    sw.slice_residual: "sw-check",
    sw.moduli_dimension: "sw-dim",
    deg.regular_preimages: "degree",
    deg.degree_z: "degree",
    deg.degree_mod2: "degree",
    deg.homotopy_invariance_report: "degree",
    emit_plot_data: "flow",
}


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

def _write_result(cfg, result) -> None:
    path = Path(cfg["output"])
    fmt = cfg.get("format", "json")
    payload = _jsonable(result)
    if fmt == "json":
        doc = {"cmd": cfg["cmd"], "version": OUTPUT_VERSION, "result": payload}
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
        path.write_text(text)
        return
    series = result.get("series")
    if series is not None:
        emit_plot_data(series["rows"], path, series["header"])
    else:
        rows = [(k, json.dumps(v, sort_keys=True)) for k, v in sorted(payload.items())]
        emit_plot_data(rows, path, ("key", "value"))


def run(config: dict, stdout=None, stderr=None) -> int:
    """Validate and execute one config; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        validate_config(config)
        worker_count()
        result, summary = HANDLERS[config["cmd"]](config)
    except NumericalError as exc:
        payload = {"error": type(exc).__name__, "kind": "numerical", "message": str(exc)}
        print(json.dumps(payload, sort_keys=True), file=stderr)
        return EXIT_NUMERICAL
    except (InputError, GaugekitError) as exc:
        payload = {"error": type(exc).__name__, "kind": "config", "message": str(exc)}
        print(json.dumps(payload, sort_keys=True), file=stderr)
        return EXIT_CONFIG
    try:
        _write_result(config, result)
    except OSError as exc:
        print(json.dumps({"error": "IoError", "kind": "config", "message": str(exc)}, sort_keys=True), file=stderr)
        return EXIT_CONFIG
    print(f"{config['cmd']}: {summary}", file=stdout)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gaugekit", description=__doc__.splitlines()[0])
    parser.add_argument("config", help="path to a JSON config file, or - for stdin")
    parser.add_argument("--output", help="override the config's output path")
    args = parser.parse_args(argv)
    try:
        text = sys.stdin.read() if args.config == "-" else Path(args.config).read_text()
        config = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "ConfigError", "kind": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    if args.output and isinstance(config, dict):
        config["output"] = args.output
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
