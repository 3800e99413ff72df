"""Command line: ``margulis profile|verify|geometry``.

Exit codes: 0 ok, 1 certified failure, 2 undetermined, 3 invalid input or
quotients exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import intervals as iv
from .cf import parse_angle_spec
from .envelope import Presence, build_profile, eval_boundary, sample_grid, u_at
from .epsilon import EpsilonConfig
from .errors import (
    MargulisError,
    PrecisionExceeded,
    PreconditionViolated,
    QuotientsExhausted,
    Undetermined,
)
from .intervals import PrecisionPolicy

EXIT_OK, EXIT_FAIL, EXIT_UNDETERMINED, EXIT_INVALID = 0, 1, 2, 3
SUITE_NAMES = ["lemmas", "fund", "universal-bound", "appendix-table", "absentees",
               "oracle-equivalence", "closest-returns", "strike-hunt"]
DIGITS = 17

DEFAULTS = {
    "epsilon": None,
    "bits_start": 128,
    "bits_cap": 8192,
    "n_max": 8,
    "r_max": None,
    "out": ".",
    "normalize": False,
    "points": 400,
}


def read_config(path):
    """Plain ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionViolated(f"{path}:{lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in DEFAULTS:
            raise PreconditionViolated(f"{path}:{lineno}: unknown key {k!r}")
        out[k] = v
    return out


def _coerce(key, value):
    if value is None:
        return None
    if key in ("bits_start", "bits_cap", "n_max", "points"):
        return int(value)
    if key == "normalize":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes", "on")
    if key in ("epsilon", "r_max"):
        return Fraction(str(value))
    return value


class RunConfig:
    """Defaults, then the config file, then explicit flags."""

    def __init__(self, args):
        merged = dict(DEFAULTS)
        if getattr(args, "config", None):
            merged.update(read_config(args.config))
        for k in DEFAULTS:
            v = getattr(args, k, None)
            if v is not None and v is not False:
                merged[k] = v
        for k, v in merged.items():
            setattr(self, k, _coerce(k, v))
        self.policy = PrecisionPolicy(self.bits_start, self.bits_cap)
        if self.epsilon is None:
            self.eps = EpsilonConfig(normalized=self.normalize)
        else:
            self.eps = EpsilonConfig(value=self.epsilon, normalized=self.normalize)
        self.out = Path(self.out)


def _lo(x):
    return iv.fmt_directed(x.lo, DIGITS)


def _hi(x):
    return iv.fmt_directed(x.hi, DIGITS, upward=True)


def _num(r):
    return repr(float(r)) if Fraction(r) == Fraction(float(r)) else str(r)


def _writer(path):
    f = open(path, "w", newline="")
    return f, csv.writer(f, lineterminator="\r\n")


# ---------------------------------------------------------------------------
# profile


def cmd_profile(args):
    cfg = RunConfig(args)
    angle = parse_angle_spec(args.spec)
    profile = build_profile(angle, cfg.n_max, policy=cfg.policy)
    cfg.out.mkdir(parents=True, exist_ok=True)

    f, w = _writer(cfg.out / "profile.csv")
    with f:
        w.writerow(["n", "q_n", "presence", "x_lo", "x_hi", "y_lo", "y_hi"])
        for e in profile.entries:
            x = ("", "") if e.x is None else (_lo(e.x), _hi(e.x))
            y = ("", "") if e.y is None else (_lo(e.y), _hi(e.y))
            w.writerow([e.n, e.q, str(e.presence), *x, *y])

    r_top = iv.to_fraction(profile.valid_r_max.lo)
    if cfg.r_max is not None:
        r_top = min(r_top, cfg.r_max)
    grid = [r for r in sample_grid(profile, cfg.points) if r <= r_top]
    env, slopes = [], []
    c = cfg.eps.c(cfg.policy.start)
    f, w = _writer(cfg.out / "envelope.csv")
    with f:
        w.writerow(["r", "B_lo", "B_hi", "argmin_q"])
        for r in grid:
            bv = eval_boundary(angle, r, cfg.eps, profile, target_bits=64, policy=cfg.policy)
            w.writerow([_num(r), _lo(bv.value), _hi(bv.value), bv.argmin])
            b = float(bv.value.mid)
            env.append((float(r), b))
            if r > 1:
                slopes.append((float(r), math.log(b / float(c.mid)) / math.log(float(r))))

    from .svg import render

    constituents = {}
    for e in profile.present:
        lo = max(float(e.x.lo) / 3, float(grid[0]))
        hi = min(float(e.y.hi) * 3, float(grid[-1]))
        if hi <= lo:
            continue
        pts = []
        for i in range(40):
            r = lo * (hi / lo) ** (i / 39)
            pts.append((r, float(u_at(angle, e.q, Fraction(r), cfg.eps, 64).mid)))
        constituents[e.q] = pts
    title = f"{angle.spec()}  (n_max={cfg.n_max}, eps={cfg.eps.describe()}{', c=1' if cfg.normalize else ''})"
    bps = [float(e.y.mid) for e in profile.present]
    (cfg.out / "figure.svg").write_text(render(title, env, constituents, slopes, bps))

    present = [e.n for e in profile.entries if e.presence is Presence.PRESENT]
    absent = [e.n for e in profile.entries if e.presence is Presence.ABSENT]
    print(f"{angle.spec()}: present {present} absent {absent}")
    if profile.undetermined_at is not None or profile.unseparated:
        print(f"undetermined at n={profile.undetermined_at}; unseparated {list(profile.unseparated)}")
        return EXIT_UNDETERMINED
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args):
    from . import verify

    angles = [parse_angle_spec(s) for s in args.specs] or None
    run = verify.SUITES[args.suite]
    result = run(angles) if angles else run()
    cfg = RunConfig(args)
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / f"{args.suite}.jsonl"
    with open(path, "w") as f:
        for row in result.rows:
            f.write(json.dumps(row, sort_keys=True, default=str) + "\n")
    print(f"{args.suite}: {result.status} ({len(result.rows)} rows, {result.failures} failures, "
          f"{result.undetermined} undetermined) -> {path}")
    return {"pass": EXIT_OK, "fail": EXIT_FAIL, "undetermined": EXIT_UNDETERMINED}[result.status]


# ---------------------------------------------------------------------------
# geometry


def _point(text):
    parts = [Fraction(p) for p in text.split(",")]
    if len(parts) != 4:
        raise PreconditionViolated("a point is r,theta,z,t")
    from .geometry import Point4

    return Point4(*parts)


def cmd_geometry(args):
    from . import geometry as geo

    cfg = RunConfig(args)
    w = csv.writer(sys.stdout, lineterminator="\r\n")
    if args.geo == "displacement":
        angle = parse_angle_spec(args.spec)
        x = _point(args.point)
        d = geo.displacement(angle, args.j, x, cfg.eps)
        w.writerow(["j", "rho_lo", "rho_hi", "in_region"])
        w.writerow([args.j, _lo(d.rho), _hi(d.rho), d.in_region])
    elif args.geo == "leaf-volume":
        angle = parse_angle_spec(args.spec)
        prof = build_profile(angle, cfg.n_max if args.n_max else 24, policy=cfg.policy)
        t = Fraction(args.t)
        r = geo.boundary_inverse(angle, t, cfg.eps, prof, policy=cfg.policy)
        v = geo.volume_from_radius(r, t)
        w.writerow(["t", "r_lo", "r_hi", "vol_lo", "vol_hi", "core_length"])
        w.writerow([_num(t), _lo(r), _hi(r), _lo(v), _hi(v), str(geo.core_length(t))])
    elif args.geo == "phi":
        a, b = parse_angle_spec(args.alpha), parse_angle_spec(args.beta)
        n = cfg.n_max if args.n_max else 20
        profs = (build_profile(a, n, policy=cfg.policy), build_profile(b, n, policy=cfg.policy))
        x = _point(args.point)
        y = geo.conjugacy_phi(a, b, x, profs, cfg.eps)
        th, t = iv.as_interval(y.theta, 128), iv.as_interval(y.t, 128)
        w.writerow(["r", "theta_lo", "theta_hi", "z", "t_lo", "t_hi"])
        w.writerow([_num(y.r), _lo(th), _hi(th), _num(y.z), _lo(t), _hi(t)])
    elif args.geo == "witness":
        a, b = parse_angle_spec(args.alpha), parse_angle_spec(args.beta)
        ws = geo.rigidity_witness(a, b, args.count, args.search_cap, cfg.eps)
        w.writerow(["n", "norm_alpha_lo", "norm_alpha_hi", "norm_beta_lo", "norm_beta_hi",
                    "probe_alpha_hi", "probe_beta_lo"])
        for p in ws.pairs:
            w.writerow([p.n, _lo(p.norm_alpha), _hi(p.norm_alpha), _lo(p.norm_beta),
                        _hi(p.norm_beta), _hi(p.alpha_disp), _lo(p.beta_lower)])
    return EXIT_OK


# ---------------------------------------------------------------------------


def _common(p):
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--epsilon", type=Fraction, help="exact rational epsilon (default sqrt(3)/(9 pi))")
    p.add_argument("--bits-start", dest="bits_start", type=int)
    p.add_argument("--bits-cap", dest="bits_cap", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--r-max", dest="r_max", type=Fraction)
    p.add_argument("--out", help="output directory")
    p.add_argument("--normalize", action="store_true", help="use c(eps) = 1")


def build_parser():
    parser = argparse.ArgumentParser(prog="margulis", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="presence table, envelope samples and figure")
    p.add_argument("spec")
    p.add_argument("--points", type=int)
    _common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITE_NAMES)
    p.add_argument("specs", nargs="*")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("geometry", help="hyperbolic quantities as CSV on stdout")
    gsub = p.add_subparsers(dest="geo", required=True)
    g = gsub.add_parser("displacement")
    g.add_argument("spec")
    g.add_argument("--j", type=int, required=True)
    g.add_argument("--point", required=True, help="r,theta,z,t as rationals")
    _common(g)
    g = gsub.add_parser("leaf-volume")
    g.add_argument("spec")
    g.add_argument("--t", required=True)
    _common(g)
    g = gsub.add_parser("phi")
    g.add_argument("alpha")
    g.add_argument("beta")
    g.add_argument("--point", required=True)
    _common(g)
    g = gsub.add_parser("witness")
    g.add_argument("alpha")
    g.add_argument("beta")
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--search-cap", dest="search_cap", type=int, default=100_000)
    _common(g)
    p.set_defaults(func=cmd_geometry)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QuotientsExhausted, PreconditionViolated, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (Undetermined, PrecisionExceeded) as exc:
        print(f"undetermined: {exc}", file=sys.stderr)
        return EXIT_UNDETERMINED
    except MargulisError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
