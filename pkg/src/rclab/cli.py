"""``rclab`` command-line entry point.

Results go to stdout and, for commands reading an instance file, also next
to it as ``<stem>.out.csv`` or ``<stem>.out.json``. Exit codes: 0 success,
2 invalid input (missing file, malformed JSON, schema violation), 3 solver
non-convergence.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import counterexamples, direct_sum, io, property_lab, solver
from .errors import NonConvergenceError, RCLabError, ValidationError
from .geometry import farthest_radius

__all__ = ["RunConfig", "run", "main", "build_parser"]

COMMANDS = ("solve", "verify-product", "modulus", "probe", "demo", "validate")


@dataclass
class RunConfig:
    command: str
    instance_path: str | None = None
    tol: float = 1e-6
    resolution: int = 101
    seed: int = 0
    emit: str = "csv"
    workers: int | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"command: unknown command {self.command!r}")
        if not self.tol > 0:
            raise ValidationError("tol: must be > 0")
        if self.resolution < 11:
            raise ValidationError("resolution: must be >= 11")
        if self.emit not in ("csv", "json"):
            raise ValidationError(f"emit: expected csv or json, got {self.emit!r}")


def _float_list(text, name):
    try:
        values = [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise ValidationError(f"{name}: expected a comma-separated list of numbers") from None
    if not values:
        raise ValidationError(f"{name}: empty list")
    return values


def _require_instance(cfg):
    if not cfg.instance_path:
        raise ValidationError("instance: --instance is required for this command")
    return io.load_json(cfg.instance_path)


def _solve(cfg):
    obj = _require_instance(cfg)
    space, V, F, tol = io.parse_instance(obj)
    tol = cfg.tol if tol is None else float(tol)
    sol = solver.restricted_radius(V, F, tol, seed=cfg.seed)
    rows = [{"index": i, "radius": sol.radius, "x": pt, "iterations": sol.iterations,
             "method": sol.method}
            for i, pt in enumerate(sol.minimizers.points)]
    return rows, {"lower_bound": sol.lower_bound, "cluster_tol": sol.cluster_tol}


def _verify_product(cfg):
    inst = io.parse_product(_require_instance(cfg))
    comp = direct_sum.product_restricted_radius(inst, cfg.tol, cfg.seed, workers=cfg.workers)
    direct = direct_sum.direct_solve(inst, cfg.tol, cfg.seed)
    F = inst.materialize()
    zero = np.zeros(inst.space.dim)
    r_comp = direct_sum.product_farthest_radius(inst, zero)
    r_mat = farthest_radius(zero, F)
    cloud = direct_sum.product_center(inst, cfg.tol, seed=cfg.seed)
    center_gap = float(np.max(
        [np.min(inst.space.norm.evaluate(cloud.points - v)) for v in direct.minimizers.points]))
    rows = [
        {"quantity": "farthest_radius_at_origin", "componentwise": r_comp, "direct": r_mat,
         "abs_gap": abs(r_comp - r_mat)},
        {"quantity": "restricted_radius", "componentwise": comp.radius, "direct": direct.radius,
         "abs_gap": abs(comp.radius - direct.radius)},
        {"quantity": "center_distance",
         "componentwise": direct_sum.product_farthest_radius(inst, cloud.points[0]),
         "direct": direct.radius, "abs_gap": center_gap},
    ]
    return rows, {"p": inst.p, "m": inst.m}


def _modulus(cfg):
    kind = cfg.options.get("kind") or "p1"
    eps = _float_list(cfg.options.get("eps") or "0.5,0.25,0.1", "eps")
    space, V, fam, anchor = io.parse_family(_require_instance(cfg))
    kw = dict(tol=cfg.tol, seed=cfg.seed)
    sols = fam.solve(V, cfg.tol, cfg.seed)
    window = property_lab._window(sols)
    anchors = [anchor] if anchor is not None else fam.members
    rows = []
    if kind == "p2":
        curve = property_lab.p2_modulus(V, fam, eps, cfg.resolution, sols=sols, window=window, **kw)
        rows = [{"kind": "P2", "anchor": "", "epsilon": e, "delta": d} for e, d in curve.pairs]
    elif kind in ("p1", "lp2"):
        for i, A in enumerate(anchors):
            if kind == "p1":
                s = next((s for G, s in zip(fam.members, sols) if G is A), None)
                curve = solver.p1_modulus(V, A, eps, cfg.resolution, sol=s, tol=cfg.tol,
                                          delta_max=window)
            else:
                curve = property_lab.lp2_modulus(V, fam, A, eps, cfg.resolution, sols=sols,
                                                 window=window, **kw)
            rows += [{"kind": curve.kind, "anchor": i, "epsilon": e, "delta": d}
                     for e, d in curve.pairs]
    else:
        raise ValidationError(f"kind: expected p1, p2 or lp2 for modulus, got {kind!r}")
    return rows, {"window": window}


def _probe(cfg):
    kind = cfg.options.get("kind") or "ured"
    obj = _require_instance(cfg)
    space = io.parse_space(io._field(obj, "space", ""))
    eps_text = cfg.options.get("eps")
    if kind == "qur":
        Y = io.parse_subspace(io._field(obj, "subspace", ""), space)
        eps = _float_list(eps_text, "eps") if eps_text else [io._real(io._field(obj, "eps", ""), "eps")]
        rows = []
        for e in eps:
            res = property_lab.qur_probe(space, Y, e)
            rows.append({"epsilon": e, "delta_estimate": res.delta_estimate,
                         "witness": "" if res.witness is None else " ".join(
                             io.format_float(c) for c in res.witness)})
        return rows, {}
    if kind == "ured":
        z = io.parse_point(io._field(obj, "z", ""), space, "z")
        eps = _float_list(eps_text, "eps") if eps_text else [float(obj.get("eps", 1.0))]
        res = property_lab.ured_probe(space, z, eps, seed=cfg.seed)
        rows = []
        for (e, m), pair in zip(res.curve.pairs, res.worst_pairs):
            row = {"epsilon": e, "modulus": m}
            if pair is not None:
                row["x"], row["y"] = pair
            rows.append(row)
        return rows, {}
    raise ValidationError(f"kind: expected qur or ured for probe, got {kind!r}")


def _demo(cfg):
    name = cfg.options.get("name")
    if name == "p2-failure":
        nmax = int(cfg.options.get("nmax") or 40)
        return counterexamples.measure_p2_failure(nmax, tol=cfg.tol), {}
    if name == "lhsc-failure":
        ks = [int(k) for k in _float_list(cfg.options.get("k") or "1,10,100", "k")]
        return counterexamples.run_lhsc_failure(ks, cfg.tol, cfg.resolution), {}
    raise ValidationError(f"demo: unknown demo {name!r} (expected p2-failure or lhsc-failure)")


def _validate(cfg):
    obj = _require_instance(cfg)
    kind = io.detect_kind(obj)
    if kind == "instance":
        space, V, F, _ = io.parse_instance(obj)
        detail = f"dim={space.dim} k={V.k} points={len(F)}"
    elif kind == "product":
        inst = io.parse_product(obj)
        detail = f"m={inst.m} p={inst.p} dim={inst.space.dim}"
    elif kind == "family":
        space, V, fam, _ = io.parse_family(obj)
        detail = f"dim={space.dim} k={V.k} members={len(fam)}"
    else:
        space = io.parse_space(io._field(obj, "space", ""))
        if "z" in obj:
            io.parse_point(obj["z"], space, "z")
        if "subspace" in obj:
            io.parse_subspace(obj["subspace"], space)
        detail = f"dim={space.dim}"
    return [{"kind": kind, "status": "ok", "detail": detail}], {}


HANDLERS = {
    "solve": _solve,
    "verify-product": _verify_product,
    "modulus": _modulus,
    "probe": _probe,
    "demo": _demo,
    "validate": _validate,
}


def run(cfg, stdout=None, stderr=None):
    """Execute ``cfg``; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        rows, meta = HANDLERS[cfg.command](cfg)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=stderr)
        return 3
    except (RCLabError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    if cfg.emit == "csv":
        text = io.rows_to_csv(rows)
    else:
        text = io.rows_to_json(rows, command=cfg.command, **meta)
    stdout.write(text)
    if cfg.instance_path:
        p = Path(cfg.instance_path)
        out = p.with_name(p.name.removesuffix(".json") + f".out.{cfg.emit}")
        out.write_text(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="rclab",
                                     description="Restricted Chebyshev center laboratory")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", dest="instance_path")
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--resolution", type=int, default=101)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--emit", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="restricted radius and centers")
    sub.add_parser("verify-product", parents=[common],
                   help="componentwise vs direct product values")
    p = sub.add_parser("modulus", parents=[common], help="P1 / P2 / lP2 moduli of a family")
    p.add_argument("--kind", choices=("p1", "p2", "lp2"), default="p1")
    p.add_argument("--eps", default="0.5,0.25,0.1")
    p = sub.add_parser("probe", parents=[common], help="QUR / URED probes")
    p.add_argument("--kind", choices=("qur", "ured"), default="ured")
    p.add_argument("--eps")
    p = sub.add_parser("demo", parents=[common], help="counterexample tables")
    p.add_argument("name", choices=("p2-failure", "lhsc-failure"))
    p.add_argument("--nmax", type=int, default=40)
    p.add_argument("--k", default="1,10,100")
    sub.add_parser("validate", parents=[common], help="check an instance file")
    return parser


def main(argv=None):
    args = vars(build_parser().parse_args(argv))
    base = {k: args.pop(k) for k in ("command", "instance_path", "tol", "resolution", "seed",
                                     "emit", "workers")}
    try:
        cfg = RunConfig(**base, options=args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
