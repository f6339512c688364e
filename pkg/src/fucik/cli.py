"""Command line front end: ``fucik eigen|curve|report|selftest``.

Configs are JSON documents::

    {"interval": [0, 3.141592653589793],
     "p": {"kind": "constant", "value": 1}, "q": {"kind": "constant", "value": 0},
     "m": {"kind": "sine", "amplitude": 1, "omega": 1, "phase": 0, "offset": 0},
     "n": {"kind": "pwlinear", "points": [[0, 1], [1, -1]]},
     "tolerances": {"rtol": 1e-10}, "k_max": 8,
     "a_grid": {"spacing": "log", "lo": 0.5, "hi": 100, "count": 16}}

``p``, ``q`` and ``n`` are optional (1, 0 and ``m``).  ``--config`` also takes
the name of a bundled preset.

Exit codes: 0 success, 1 a check failed, 2 usage, config or I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import eigen, spectrum
from .sl_core import FucikError, PiecewiseFn, ProblemError, SLProblem, Tolerances
from .zerofn import phi, psi1, psi2, sign_profile

SCHEMA = "fucik-report/1"
PRESETS = ("neumann_constant", "sine_balanced", "sine_offset", "zigzag_N2", "zigzag_N3")
END_ALIASES = {">": ">", "<": "<", "gt": ">", "lt": "<"}


class ConfigError(FucikError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- serialization -------------------------------------------------------------

def fmt_num(x) -> str:
    """17 significant digits; round-trips every double."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0 and math.copysign(1.0, x) < 0:
        return "-0.0"  # "-0" would read back as the integer 0
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed float formatting and insertion-ordered keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (bool, np.bool_, int, float, np.integer, np.floating)):
        return fmt_num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _num(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    try:
        x = float(v)
    except ValueError:
        raise ConfigError(path, f"expected a number, got {v!r}") from None
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    return x


def function_to_dict(f: PiecewiseFn) -> dict:
    if f.kind == "constant":
        return {"kind": "constant", "value": f.value}
    if f.kind == "sine":
        return {"kind": "sine", "amplitude": f.amplitude, "omega": f.omega,
                "phase": f.phase, "offset": f.offset}
    return {"kind": "pwlinear", "points": [list(pt) for pt in f.points]}


def function_from_dict(d, path: str) -> PiecewiseFn:
    if not isinstance(d, dict):
        raise ConfigError(path, "expected an object with a 'kind'")
    kind = d.get("kind")
    try:
        if kind == "constant":
            return PiecewiseFn.constant(_num(d.get("value"), f"{path}.value"))
        if kind == "sine":
            return PiecewiseFn.sine(_num(d.get("amplitude"), f"{path}.amplitude"),
                                    _num(d.get("omega"), f"{path}.omega"),
                                    _num(d.get("phase", 0.0), f"{path}.phase"),
                                    _num(d.get("offset", 0.0), f"{path}.offset"))
        if kind == "pwlinear":
            pts = d.get("points")
            if not isinstance(pts, list):
                raise ConfigError(f"{path}.points", "expected a list of [t, y] pairs")
            parsed = []
            for i, pt in enumerate(pts):
                if not isinstance(pt, list) or len(pt) != 2:
                    raise ConfigError(f"{path}.points[{i}]", "expected a [t, y] pair")
                parsed.append((_num(pt[0], f"{path}.points[{i}][0]"),
                               _num(pt[1], f"{path}.points[{i}][1]")))
            return PiecewiseFn.pwlinear(parsed)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.kind", f"unknown kind {kind!r} (constant, pwlinear, sine)")


@dataclass(frozen=True)
class GridSpec:
    spacing: str = "log"
    lo: float = 0.5
    hi: float = 100.0
    count: int = 16

    def values(self, sign: int = 1) -> np.ndarray:
        if self.spacing == "log":
            g = np.geomspace(self.lo, self.hi, self.count)
        else:
            g = np.linspace(self.lo, self.hi, self.count)
        return sign * g


@dataclass(frozen=True)
class ProblemConfig:
    problem: SLProblem
    tolerances: Tolerances = field(default_factory=Tolerances)
    k_max: int = 8
    a_grid: GridSpec = field(default_factory=GridSpec)

    def to_dict(self) -> dict:
        pr = self.problem
        return {
            "interval": [pr.t1, pr.t2],
            "p": function_to_dict(pr.p),
            "q": function_to_dict(pr.q),
            "m": function_to_dict(pr.m),
            "n": function_to_dict(pr.n),
            "tolerances": dataclasses.asdict(self.tolerances),
            "k_max": self.k_max,
            "a_grid": dataclasses.asdict(self.a_grid),
        }

    @classmethod
    def from_dict(cls, d) -> "ProblemConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        iv = d.get("interval")
        if not isinstance(iv, list) or len(iv) != 2:
            raise ConfigError("interval", "expected [t1, t2]")
        t1, t2 = _num(iv[0], "interval[0]"), _num(iv[1], "interval[1]")
        if "m" not in d:
            raise ConfigError("m", "weight m is required")
        m = function_from_dict(d["m"], "m")
        n = function_from_dict(d["n"], "n") if "n" in d else m
        p = function_from_dict(d["p"], "p") if "p" in d else PiecewiseFn.constant(1.0)
        q = function_from_dict(d["q"], "q") if "q" in d else PiecewiseFn.constant(0.0)
        try:
            prob = SLProblem(t1, t2, p, q, m, n)
        except ProblemError as exc:
            raise ConfigError(exc.field, str(exc)) from None
        tol_d = d.get("tolerances", {}) or {}
        known = {f.name: f.type for f in dataclasses.fields(Tolerances)}
        kw = {}
        for key, val in tol_d.items():
            if key not in known:
                raise ConfigError(f"tolerances.{key}", "unknown tolerance")
            x = _num(val, f"tolerances.{key}")
            if not x > 0:
                raise ConfigError(f"tolerances.{key}", "must be positive")
            kw[key] = int(x) if key == "max_steps" else x
        k_max = d.get("k_max", 8)
        if isinstance(k_max, bool) or not isinstance(k_max, int) or k_max < 1:
            raise ConfigError("k_max", "expected an integer >= 1")
        g = d.get("a_grid", {}) or {}
        grid = GridSpec(spacing=g.get("spacing", "log"),
                        lo=_num(g.get("lo", 0.5), "a_grid.lo"),
                        hi=_num(g.get("hi", 100.0), "a_grid.hi"),
                        count=int(g.get("count", 16)))
        if grid.spacing not in ("log", "linear"):
            raise ConfigError("a_grid.spacing", "expected 'log' or 'linear'")
        if not 0 < grid.lo < grid.hi or grid.count < 1:
            raise ConfigError("a_grid", "need 0 < lo < hi and count >= 1")
        return cls(prob, Tolerances(**kw), k_max, grid)


def preset_path(name: str):
    return resources.files("fucik") / "presets" / f"{name}.json"


def load_config(ref: str) -> ProblemConfig:
    """Read a config from a path or a preset name (``sine_balanced``, ``presets/x.json``)."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    else:
        name = path.name[:-5] if path.name.endswith(".json") else path.name
        res = preset_path(name)
        if not res.is_file():
            raise FileNotFoundError(f"no config file or preset named {ref!r}")
        text = res.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return ProblemConfig.from_dict(data)


# -- commands ------------------------------------------------------------------

def _csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt_num(v) for v in row) + "\n")
    return out.getvalue()


def cmd_eigen(cfg: ProblemConfig, weight_sel: str = "m", branch: str = "both",
              count: int = 3, fmt: str = "csv") -> str:
    prof = sign_profile(cfg.problem, weight_sel)
    branches = ["positive", "negative"] if branch == "both" else [branch]
    rows = []
    for br in branches:
        if (br == "positive" and not prof.has_positive) or (br == "negative" and not prof.has_negative):
            continue
        for ev in eigen.eigenvalues(cfg.problem, weight_sel, br, count, cfg.tolerances):
            rows.append(ev)
    if fmt == "json":
        return dumps({"schema": SCHEMA, "weight": weight_sel,
                      "eigenvalues": [dataclasses.asdict(ev) for ev in rows]}) + "\n"
    return _csv(["index", "value", "interior_zeros", "miss_residual"],
                [(ev.index, ev.value, ev.interior_zeros, ev.miss_residual) for ev in rows])


def cmd_curve(cfg: ProblemConfig, k: int, end_sign: str, quadrant: str, fmt: str = "csv") -> str:
    sa = 1 if quadrant[0] == "+" else -1
    cid = spectrum.CurveId(k, end_sign)
    curve = spectrum.trace_curve(cfg.problem, cid, quadrant, cfg.a_grid.values(sa), cfg.tolerances)
    if fmt == "json":
        return dumps({"schema": SCHEMA, "k": k, "end_sign": end_sign, "quadrant": quadrant,
                      "monotone": curve.monotone,
                      "samples": [{"a": s.a, "b": s.b, "residual": s.residual,
                                   "chain_zeros": list(s.chain_zeros)} for s in curve.samples]}) + "\n"
    return _csv(["a", "b", "k", "end_sign", "residual"],
                [(s.a, s.b, k, end_sign, s.residual) for s in curve.samples])


def _opt(fn, *args):
    try:
        return fn(*args)
    except spectrum.UndefinedAsymptote:
        return None


def build_report(cfg: ProblemConfig) -> dict:
    prob, tol = cfg.problem, cfg.tolerances
    weights = ("m",) if prob.single_weight else ("m", "n")
    doc: dict = {"schema": SCHEMA, "config": cfg.to_dict()}
    doc["sign_changes"] = {w: sign_profile(prob, w).N for w in ("m", "n")}
    doc["principal_eigenvalues"] = {
        w: {br: eigen.principal(prob, w, br, tol) for br in ("positive", "negative")}
        for w in weights}
    if prob.single_weight:
        g = spectrum.gap_constants(prob, tol)
        doc["gap"] = dataclasses.asdict(g)
    else:
        doc["gap"] = None
    quads = {}
    for quad in spectrum.QUADRANTS:
        rep = spectrum.count_curves(prob, quad, cfg.k_max, tol)
        curves = []
        for cid, double in rep.nonempty_curves:
            hit = rep.probes.get(cid)
            entry = {"k": cid.k, "end_sign": cid.end_sign, "double": double,
                     "witness": list(hit) if hit else None, "domain": None}
            if hit:
                start, far_b = spectrum.domain_estimate(prob, cid, quad, hit[0], tol)
                entry["domain"] = {"a_start": start, "a_top": math.copysign(spectrum.PROBE_TOP, start),
                                   "b_at_a_top": far_b}
            curves.append(entry)
        asym = {}
        for es in (">", "<"):
            pair = _opt(spectrum.asymptotes, prob, quad, es, tol)
            asym[es] = None if pair is None else {"vertical": pair[0], "horizontal": pair[1]}
        quads[quad] = {"count": rep.count, "saturated": rep.saturated,
                       "curves": curves, "asymptotes": asym}
    doc["quadrants"] = quads
    return doc


def cmd_report(cfg: ProblemConfig) -> str:
    return dumps(build_report(cfg)) + "\n"


def _check(name, err, bound):
    ok = bool(err <= bound)
    return ok, f"{'PASS' if ok else 'FAIL'}  {name}: error {err:.3e} (bound {bound:.1e})"


def cmd_selftest(tol: Tolerances | None = None) -> tuple[bool, list[str]]:
    """Closed-form checks on the constant problem ``-u'' = a u`` on ``[0, pi]``."""
    tol = tol or Tolerances()
    pr = SLProblem.single(0.0, math.pi, PiecewiseFn.constant(1.0))
    lines, oks = [], []

    def add(res):
        oks.append(res[0])
        lines.append(res[1])

    evs = eigen.eigenvalues(pr, "m", "positive", 5, tol)
    add(_check("eigenvalues (k-1)^2, k=1..5",
               max(abs(ev.value - (i) ** 2) for i, ev in enumerate(evs)), 1e-8))
    err = 0.0
    for a in (0.25, 1.0, 4.0, 100.0):
        r = math.pi / (2 * math.sqrt(a))
        err = max(err, abs(psi1(pr, "m", a, tol) - r), abs(psi2(pr, "m", a, tol) - (math.pi - r)))
        s = 0.1
        if s + 2 * r <= math.pi:
            err = max(err, abs(phi(pr, "m", a, s, tol) - (s + 2 * r)))
    add(_check("zero-functions psi1, psi2, phi", err, 1e-9))
    cid = spectrum.CurveId(1, "<")
    err = max(abs(spectrum.solve_b(pr, a, cid, "++", tol) - 1 / (4 * (1 - 1 / (2 * math.sqrt(a))) ** 2))
              for a in (0.5, 1.0, 2.0, 4.0, 25.0))
    add(_check("first curve 1/(2 sqrt a) + 1/(2 sqrt b) = 1", err, 1e-7))
    v, h = spectrum.asymptotes(pr, "++", ">", tol)
    add(_check("asymptotes alpha = beta = 1/4", max(abs(v - 0.25), abs(h - 0.25)), 1e-8))
    add(_check("gap epsilon = 1/4", abs(spectrum.gap_epsilon(pr, tol) - 0.25), 1e-8))
    grid = (1e2, 1e3, 1e4)
    bs = [spectrum.solve_b(pr, a, spectrum.CurveId(1, ">"), "++", tol) for a in grid]
    errs = [b - 0.25 for b in bs]
    drift = max(abs(b - 1 / (4 * (1 - 1 / (2 * math.sqrt(a))) ** 2)) for a, b in zip(grid, bs))
    ok = bool(errs[0] > errs[1] > errs[2] > 0 and errs[2] < errs[0] / 10 and drift <= 1e-7)
    oks.append(ok)
    lines.append(f"{'PASS' if ok else 'FAIL'}  asymptote approach at a = 1e2, 1e3, 1e4: "
                 f"distances {errs[0]:.3e}, {errs[1]:.3e}, {errs[2]:.3e}; "
                 f"closed-form error {drift:.3e} (bound 1.0e-07)")
    return all(oks), lines


# -- argument handling ---------------------------------------------------------

def _end_sign(s: str) -> str:
    if s not in END_ALIASES:
        raise argparse.ArgumentTypeError("expected one of >, <, gt, lt")
    return END_ALIASES[s]


def _quadrant(s: str) -> str:
    if s not in spectrum.QUADRANTS:
        raise argparse.ArgumentTypeError("expected one of ++, +-, -+, --")
    return s


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fucik", description="Fucik spectrum of 1-D Neumann problems")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, formats=True):
        p.add_argument("--config", required=True, help="config path or preset name")
        p.add_argument("--out", default="-", help="output file (default stdout)")
        if formats:
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("eigen", help="eigenvalues of L u = lam * weight * u")
    common(p)
    p.add_argument("--weight", choices=("m", "n"), default="m")
    p.add_argument("--branch", choices=("positive", "negative", "both"), default="both")
    p.add_argument("--count", type=int, default=3)

    p = sub.add_parser("curve", help="trace one curve over the config's a-grid")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--end-sign", type=_end_sign, required=True)
    p.add_argument("--quadrant", type=_quadrant, default="++")

    p = sub.add_parser("report", help="JSON report of counts, asymptotes and gap")
    common(p, formats=False)
    p.add_argument("--format", choices=("json",), default="json")

    p = sub.add_parser("selftest", help="closed-form checks")
    p.add_argument("--rtol", type=float, default=None, help="override the integrator rtol")
    return ap


def _emit(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            tol = Tolerances() if args.rtol is None else dataclasses.replace(Tolerances(), rtol=args.rtol)
            ok, lines = cmd_selftest(tol)
            print("\n".join(lines))
            return 0 if ok else 1
        cfg = load_config(args.config)
        if args.command == "eigen":
            if args.count < 1:
                raise ConfigError("--count", "must be >= 1")
            text = cmd_eigen(cfg, args.weight, args.branch, args.count, args.format)
        elif args.command == "curve":
            if args.k < 1:
                raise ConfigError("--k", "must be >= 1")
            text = cmd_curve(cfg, args.k, args.end_sign, args.quadrant, args.format)
        else:
            text = cmd_report(cfg)
        _emit(text, args.out)
    except (OSError, ConfigError) as exc:
        print(f"fucik: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
