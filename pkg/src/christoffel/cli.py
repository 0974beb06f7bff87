"""Command-line front end.

Subcommands: eval, max, sigma, certify, norms, table.  Domains are read
from JSON files (schema in the geometry module / README).  Outputs are
JSON or CSV with 17 significant digits; identical seeds and configs give
byte-identical files.

Exit codes: 0 ok; 2 malformed domain JSON; 3 dimension mismatch;
4 degraded Gram (values are still printed, flagged); 5 certificate
premise verification failed; 1 other errors.
"""
import argparse
import json
import sys
from dataclasses import dataclass
from math import inf

import numpy as np

from . import asymptotics, geometry
from .errors import DimensionMismatch, DomainFormatError
from .evaluator import ChristoffelEvaluator, bootstrap_check, christoffel_max
from .moments import GramFamily
from .geometry import AffineMap


@dataclass
class RunConfig:
    """Parsed invocation: command, inputs, and output routing."""

    command: str
    domain_path: str | None = None
    degrees: list | None = None
    point: np.ndarray | None = None
    output: str | None = None
    seed: int = 0
    resolution: int = 64
    format: str = "json"


def _fmt(value):
    return f"{value:.17g}"


def parse_degrees(text):
    """'a:b:s' inclusive range with stride; 'a:b' stride 1; 'n' single."""
    parts = text.split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    lo, hi = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) > 2 else 1
    if step < 1 or hi < lo:
        raise ValueError(f"bad degree range {text!r}")
    return list(range(lo, hi + 1, step))


def parse_point(text):
    vals = [float(v) for v in text.replace(",", " ").split()]
    if not vals:
        raise ValueError("empty point")
    return np.asarray(vals)


def _write(config, text):
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _load(config):
    return geometry.load_domain(config.domain_path)


def cmd_eval(config):
    domain = _load(config)
    if config.point is None:
        raise ValueError("eval requires --point")
    if config.point.size != domain.dim:
        raise DimensionMismatch(
            f"point has dim {config.point.size}, domain has dim {domain.dim}"
        )
    n = config.degrees[0]
    family = GramFamily(domain, seed=config.seed)
    system = family.system(n)
    ev = ChristoffelEvaluator(system)
    c = ev.christoffel_at(config.point)
    record = {
        "x": [float(v) for v in config.point],
        "n": n,
        "C": c,
        "ratio": float(np.sqrt(c)),
        "degraded": bool(system.degraded),
    }
    if config.format == "csv":
        head = ",".join(["n", "C", "ratio", "degraded"]
                        + [f"x_{i+1}" for i in range(domain.dim)])
        row = ",".join([str(n), _fmt(c), _fmt(np.sqrt(c)), str(int(system.degraded))]
                       + [_fmt(v) for v in config.point])
        _write(config, head + "\n" + row + "\n")
    else:
        _write(config, json.dumps(record, indent=2))
    return 4 if system.degraded else 0


def cmd_max(config):
    domain = _load(config)
    n = config.degrees[0]
    family = GramFamily(domain, seed=config.seed)
    system = family.system(n)
    ev = ChristoffelEvaluator(system)
    report = christoffel_max(ev, resolution=config.resolution, seed=config.seed)
    record = {
        "n": n,
        "value": report.value,
        "argmax": [float(v) for v in report.argmax],
        "candidates_examined": report.candidates_examined,
        "degraded": report.degraded,
    }
    _write(config, json.dumps(record, indent=2))
    return 4 if report.degraded else 0


def cmd_sigma(config, csv_path=None):
    domain = _load(config)
    family = GramFamily(domain, seed=config.seed)
    sweep = asymptotics.max_over_degrees(
        domain, config.degrees, family=family,
        resolution=config.resolution, seed=config.seed,
    )
    est = asymptotics.fit_sigma(domain, config.degrees, sweep=sweep)
    lines = ["n,C_max," + ",".join(f"argmax_{i+1}" for i in range(domain.dim))
             + ",degraded"]
    for n, rep in sweep:
        lines.append(
            ",".join([str(n), _fmt(rep.value)]
                     + [_fmt(v) for v in rep.argmax]
                     + [str(int(rep.degraded))])
        )
    csv_text = "\n".join(lines) + "\n"
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    payload = {"domain": domain.to_dict(), **est.to_dict()}
    if config.format == "csv":
        _write(config, csv_text)
    else:
        _write(config, json.dumps(payload, indent=2))
    return 0


def _default_upper_map(domain, n):
    if isinstance(domain, geometry.HalfBall) and domain.dim == 3:
        return geometry.half_ball_map(n)
    if isinstance(domain, geometry.BallP) and domain.p == 2.0:
        return AffineMap.identity(domain.dim)
    raise ValueError(
        "no default inscription map for this domain; pass --map-file"
    )


def cmd_certify(config, kind, m_decay=2, map_file=None, xi=None):
    domain = _load(config)
    n = config.degrees[0]
    tmap = None
    if map_file:
        with open(map_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        tmap = AffineMap(data["A"], data["b"])
    if kind == "lower-tensor":
        if tmap is None:
            box = domain.bounding_box()
            half = 0.5 * (box[:, 1] - box[:, 0])
            mid = 0.5 * (box[:, 1] + box[:, 0])
            tmap = AffineMap.scaling(half, mid)
        target = config.point
        if target is None:
            target = domain.sharp_candidates()[0]
        y = tmap.inverse()(np.asarray(target, float))
        cert = asymptotics.tensor_lower_certificate(domain, tmap, y, n,
                                                    seed=config.seed)
    elif kind == "lower-parallel":
        direction = xi if xi is not None else -np.eye(domain.dim)[0]
        cert = asymptotics.parallel_section_lower(domain, direction, n, m=m_decay)
    elif kind == "upper-ellipsoid":
        tmap = tmap or _default_upper_map(domain, n)
        cert = asymptotics.inscribed_upper_certificate(domain, tmap, n)
    elif kind == "upper-cone":
        cert = asymptotics.lp_cone_upper_certificate(domain, n)
    else:
        raise ValueError(f"unknown certificate kind {kind!r}")
    _write(config, json.dumps(cert.to_dict(), indent=2))
    return 0 if cert.verified else 5


def cmd_norms(config, q=2.0, r=inf, s=1):
    domain = _load(config)
    n = config.degrees[0]
    family = GramFamily(domain, seed=config.seed)
    system = family.system(n)
    ev = ChristoffelEvaluator(system)
    rng = np.random.default_rng(config.seed)
    coeffs = rng.standard_normal(system.size)
    report = bootstrap_check(ev, coeffs, q, r, s=s, family=family,
                             seed=config.seed, resolution=config.resolution)
    record = {
        "n": n,
        "q": q,
        "r": "inf" if r == inf else r,
        "s": s,
        "ratio": report.ratio,
        "bound_direct": report.bound_direct,
        "bound_power": report.bound_power,
        "passed": report.passed,
        "slack": report.slack,
        "sampling_error": report.sampling_error,
        "degraded": system.degraded,
    }
    _write(config, json.dumps(record, indent=2))
    return 0 if report.passed else 1


def _table_rows():
    rows = []
    def add(label, domain):
        rows.append((label, domain, asymptotics.sigma_reference(domain)))
    add("interval", geometry.Cube(1))
    add("cube d=2", geometry.Cube(2))
    add("cube d=3", geometry.Cube(3))
    for d in (2, 3):
        for p in (1.0, 1.5, 2.0, 3.0, inf):
            add(f"ball_p d={d} p={'inf' if p == inf else p}", geometry.BallP(d, p))
    add("triangle (simplex d=2)", geometry.Simplex([[0, 0], [1, 0], [0, 1]]))
    add("tetrahedron (simplex d=3)",
        geometry.Simplex([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    add("half-disk", geometry.HalfBall(2))
    add("half-ball d=3", geometry.HalfBall(3))
    add("cone over disk", geometry.ConeDisk())
    add("disk x interval",
        geometry.Product([geometry.BallP(2, 2), geometry.interval(0.0, 1.0)]))
    return rows


def cmd_table(config):
    rows = _table_rows()
    if config.format == "csv":
        lines = ["label,type,dim,sigma"]
        for label, dom, sigma in rows:
            lines.append(f"{label},{dom.kind},{dom.dim},{_fmt(sigma)}")
        _write(config, "\n".join(lines) + "\n")
    else:
        payload = [
            {"label": label, "domain": dom.to_dict(), "sigma": sigma}
            for label, dom, sigma in rows
        ]
        _write(config, json.dumps(payload, indent=2))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="christoffel",
        description="Christoffel functions, Nikol'skii exponents, certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, domain=True):
        if domain:
            p.add_argument("--domain", required=True, help="domain JSON file")
        p.add_argument("--output", default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--resolution", type=int, default=64)
        p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("eval", help="Christoffel value at a point")
    common(p)
    p.add_argument("--degree", required=True)
    p.add_argument("--point", required=True)

    p = sub.add_parser("max", help="max of C over the domain")
    common(p)
    p.add_argument("--degree", required=True)

    p = sub.add_parser("sigma", help="fit the Nikol'skii exponent")
    common(p)
    p.add_argument("--degrees", required=True, help="a:b:s inclusive range")
    p.add_argument("--csv", default=None, help="also write the (n, C_max) CSV here")

    p = sub.add_parser("certify", help="produce a bound certificate")
    common(p)
    p.add_argument("--kind", required=True,
                   choices=["lower-tensor", "lower-parallel",
                            "upper-ellipsoid", "upper-cone"])
    p.add_argument("--degree", required=True)
    p.add_argument("--point", default=None)
    p.add_argument("--xi", default=None, help="section direction (lower-parallel)")
    p.add_argument("--m", type=int, default=2, help="decay order (lower-parallel)")
    p.add_argument("--map-file", default=None, help="affine map JSON {A, b}")

    p = sub.add_parser("norms", help="norm-bootstrap check on a random polynomial")
    common(p)
    p.add_argument("--degree", required=True)
    p.add_argument("--q", default="2")
    p.add_argument("--r", default="inf")
    p.add_argument("--s", type=int, default=1)

    p = sub.add_parser("table", help="closed-form sigma reference table")
    common(p, domain=False)
    return parser


def _real(text):
    return inf if text.strip().lower() in ("inf", "infinity") else float(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            domain_path=getattr(args, "domain", None),
            degrees=(parse_degrees(args.degrees) if hasattr(args, "degrees")
                     else parse_degrees(args.degree) if hasattr(args, "degree")
                     else None),
            point=(parse_point(args.point)
                   if getattr(args, "point", None) else None),
            output=args.output,
            seed=args.seed,
            resolution=args.resolution,
            format=args.format,
        )
        if args.command == "eval":
            return cmd_eval(config)
        if args.command == "max":
            return cmd_max(config)
        if args.command == "sigma":
            return cmd_sigma(config, csv_path=args.csv)
        if args.command == "certify":
            xi = parse_point(args.xi) if args.xi else None
            return cmd_certify(config, args.kind, m_decay=args.m,
                               map_file=args.map_file, xi=xi)
        if args.command == "norms":
            return cmd_norms(config, q=_real(args.q), r=_real(args.r), s=args.s)
        if args.command == "table":
            return cmd_table(config)
        parser.error(f"unknown command {args.command}")
    except DomainFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
