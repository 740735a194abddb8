"""Command-line front end.

Every subcommand reads JSON (a dessin, a tree or a polynomial) from
``--input`` or stdin and writes JSON, DOT or text to ``--output`` or
stdout, so commands compose as shell pipelines::

    dessins shabat --input tree.json | dessins monodromy | dessins iso tree.json -

Exit codes: 0 on success, 1 on domain errors (a JSON object on stderr),
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable

from . import hypermap as hm
from .monodromy import MonodromyError, TrackConfig, monodromy_pair
from .perm import GroupOrderOverflow, PermutationError, group_order
from .poly import poly_from_json, poly_to_json
from .rh_ode import ode_for_family, verify_family
from .shabat import (
    FAMILIES,
    AmbiguousClusteringError,
    SolverConfig,
    SolverError,
    solve_tree,
)

__all__ = ["run", "main", "UsageError"]

FORMATS = ("json", "dot", "text")

#: options that may also be set from a ``--config`` file, with their types
_CONFIG_KEYS: dict[str, Callable[[str], Any]] = {
    "format": str,
    "seed": int,
    "cap": int,
    "max_starts": int,
    "tol": float,
    "max_degree": int,
    "loop_radius": float,
    "initial_step": float,
    "min_step": float,
    "guard_factor": float,
    "infinity_radius": float,
    "basepoint": float,
    "samples": int,
}

_TRACK_KEYS = ("loop_radius", "initial_step", "min_step", "guard_factor", "infinity_radius", "basepoint")


class UsageError(Exception):
    """Bad invocation; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def read_config(path: str) -> dict[str, Any]:
    """Parse a ``key = value`` file; ``#`` starts a comment, dashes in keys are allowed."""
    out = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            out[key] = _CONFIG_KEYS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return out


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = {"default": argparse.SUPPRESS} if suppress else {}
    p.add_argument("--input", help='input path, or "-" for stdin', **({"default": "-"} if not suppress else d))
    p.add_argument("--output", help="output path (default stdout)", **({"default": None} if not suppress else d))
    p.add_argument("--format", choices=FORMATS, **({"default": None} if not suppress else d))
    p.add_argument("--seed", type=int, **({"default": None} if not suppress else d))
    p.add_argument("--config", help="key=value file mirroring the flags", **({"default": None} if not suppress else d))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dessins", description="Compute with dessins d'enfants.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        _global_flags(p, suppress=True)
        return p

    add("validate", "check a dessin JSON and report its invariants")
    p = add("info", "genus, passport, tree flag and cartographic group order")
    p.add_argument("--cap", type=int, default=None, help="element cap for the group order (default 1000000)")
    add("canon", "canonical form of a dessin")
    p = add("iso", "are two dessins isomorphic")
    p.add_argument("first", help='dessin JSON path, or "-"')
    p.add_argument("second", help='dessin JSON path, or "-"')
    p = add("enumerate", "all dessins (or plane trees) with n half-edges")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trees", action="store_true", help="list plane trees only")
    p = add("shabat", "Shabat polynomial of a plane tree")
    p.add_argument("--report", help="write the solver report JSON here")
    p.add_argument("--max-starts", dest="max_starts", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-degree", dest="max_degree", type=int, default=None)
    p = add("monodromy", "dessin of a polynomial with critical values {0, 1}")
    p.add_argument("--report", help="write the monodromy report JSON here")
    for key in _TRACK_KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=float, default=None)
    p = add("ode", "hypergeometric ODE of a tree family")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--samples", type=int, default=None)
    add("render", "DOT drawing of a dessin")
    return parser


def _option(args, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return config.get(key, default)


def _read_text(path: str, stdin) -> str:
    if path == "-":
        return stdin.read()
    return Path(path).read_text()


def _load_json(path: str, stdin) -> Any:
    return json.loads(_read_text(path, stdin))


def _finite(obj):
    """Replace non-finite floats so the output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _dumps(obj) -> str:
    return json.dumps(_finite(obj), indent=2) + "\n"


def _text_lines(obj: dict) -> str:
    lines = []
    for k, v in obj.items():
        if not isinstance(v, str):
            v = json.dumps(_finite(v))
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n"


def _emit(obj, fmt: str, dessin: hm.Hypermap | None = None) -> str:
    if fmt == "dot":
        if dessin is None:
            raise UsageError("--format dot is only available for commands that output a dessin")
        return hm.to_dot(dessin)
    if fmt == "text":
        if isinstance(obj, dict):
            return _text_lines(obj)
        return f"{json.dumps(_finite(obj))}\n"
    return _dumps(obj)


def _write(path: str | None, text: str, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        Path(path).write_text(text)


def _error_payload(exc: Exception) -> dict:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("best_residual", "gap", "tol"):
        if hasattr(exc, attr):
            payload[attr] = getattr(exc, attr)
    if hasattr(exc, "location"):
        loc = complex(exc.location)
        payload["location"] = [loc.real, loc.imag]
    for attr in ("target", "found"):
        value = getattr(exc, attr, None)
        if isinstance(value, hm.Passport):
            payload[attr] = value.as_dict()
    return payload


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, dessin-or-None) or raises


def _cmd_validate(args, config, stdin):
    h = hm.from_json(_load_json(args.input, stdin))
    rel = (h.sigma * h.alpha * h.phi).images == tuple(range(1, h.n + 1))
    return {"valid": True, "n": h.n, "transitive": True, "relation_identity": rel, "phi": str(h.phi)}, None


def _cmd_info(args, config, stdin):
    h = hm.from_json(_load_json(args.input, stdin))
    g = hm.genus(h)
    cap = _option(args, config, "cap", 1_000_000)
    order = group_order([h.sigma, h.alpha], h.n, cap)
    return {
        "n": h.n,
        "sigma": str(h.sigma),
        "alpha": str(h.alpha),
        "phi": str(h.phi),
        "genus": g.genus,
        "euler_characteristic": g.chi,
        "vertices": {"black": g.B, "white": g.W},
        "faces": g.F,
        "passport": hm.passport(h).as_dict(),
        "plane_tree": hm.is_plane_tree(h),
        "group_order": str(order) if isinstance(order, GroupOrderOverflow) else order,
    }, None


def _cmd_canon(args, config, stdin):
    c = hm.canonical_form(hm.from_json(_load_json(args.input, stdin)))
    return hm.to_json(c), c


def _cmd_iso(args, config, stdin):
    if args.first == "-" and args.second == "-":
        raise UsageError("iso: at most one input may be stdin")
    a = hm.from_json(_load_json(args.first, stdin))
    b = hm.from_json(_load_json(args.second, stdin))
    return hm.is_isomorphic(a, b), None


def _cmd_enumerate(args, config, stdin):
    found = hm.plane_trees(args.n) if args.trees else hm.enumerate_hypermaps(args.n)
    return {"n": args.n, "trees_only": args.trees, "count": len(found),
            "dessins": [hm.to_json(h) for h in found]}, None


def _cmd_shabat(args, config, stdin):
    tree = hm.from_json(_load_json(args.input, stdin))
    cfg = SolverConfig(
        tol=_option(args, config, "tol", SolverConfig.tol),
        max_starts=_option(args, config, "max_starts", SolverConfig.max_starts),
        max_degree=_option(args, config, "max_degree", SolverConfig.max_degree),
        seed=_option(args, config, "seed", SolverConfig.seed),
    )
    sp = solve_tree(tree, cfg)
    if args.report:
        Path(args.report).write_text(_dumps(sp.report))
    return poly_to_json(sp.poly), None


def _cmd_monodromy(args, config, stdin):
    poly = poly_from_json(_load_json(args.input, stdin))
    kwargs = {k: _option(args, config, k, None) for k in _TRACK_KEYS}
    cfg = TrackConfig(**{k: v for k, v in kwargs.items() if v is not None})
    r = monodromy_pair(poly, cfg)
    h = hm.from_pair(len(r.fiber), r.sigma, r.alpha)
    if args.report:
        Path(args.report).write_text(_dumps(r.to_json()))
    return hm.to_json(h), h


def _cmd_ode(args, config, stdin):
    ode = ode_for_family(args.family, args.n)
    if not args.verify:
        return ode.to_json(), None
    rep = verify_family(args.family, args.n, samples=_option(args, config, "samples", 20),
                        seed=_option(args, config, "seed", 0))
    out = {"ode": ode.to_json(), "equation": str(ode), "verification": rep.to_json()}
    if not rep.passed:
        raise _VerificationFailed(out)
    return out, None


def _cmd_render(args, config, stdin):
    h = hm.from_json(_load_json(args.input, stdin))
    return None, h


class _VerificationFailed(Exception):
    def __init__(self, payload: dict):
        super().__init__("ODE verification failed")
        self.payload = payload


_COMMANDS = {
    "validate": _cmd_validate,
    "info": _cmd_info,
    "canon": _cmd_canon,
    "iso": _cmd_iso,
    "enumerate": _cmd_enumerate,
    "shabat": _cmd_shabat,
    "monodromy": _cmd_monodromy,
    "ode": _cmd_ode,
    "render": _cmd_render,
}

_DOMAIN_ERRORS = (
    ValueError,  # includes PermutationError, HypermapError, JSONDecodeError
    PermutationError,
    SolverError,
    MonodromyError,
    AmbiguousClusteringError,
    OSError,
    KeyError,
)


def run(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    """Run one CLI invocation and return its exit code."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        config = read_config(args.config) if args.config else {}
        fmt = _option(args, config, "format", "dot" if args.command == "render" else "json")
        if fmt not in FORMATS:
            raise UsageError(f"unknown format {fmt!r}")
        if args.command == "render" and fmt == "json":
            raise UsageError("render writes DOT; use --format dot or text")
        payload, dessin = _COMMANDS[args.command](args, config, stdin)
        if args.command == "render":
            fmt = "dot"
        text = _emit(payload, fmt, dessin)
        _write(args.output, text, stdout)
        return 0
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return 2
    except _VerificationFailed as exc:
        _write(args.output, _dumps(exc.payload), stdout)
        stderr.write(_dumps({"error": "VerificationFailed", "message": str(exc)}))
        return 1
    except _DOMAIN_ERRORS as exc:
        stderr.write(_dumps(_error_payload(exc)))
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
