"""Command-line front end ``alia``.

Example usage:
    $ alia --config preset:sl3-d6-a --command kac --format table
    $ alia --config preset:sl2-z5 --command quotient --point 0 --m 3
    $ alia --config my-action.json --command wildness --nmax 20 --out report.json

Exit codes: 0 success, 2 configuration error, 3 violated mathematical
precondition, 4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from alia.config import ActionConfig, build_action_config, read_config_document, validate_document
from alia.equivariant import FilteredALiA, ideal_chain, invariant_basis, jet_label, stabilizer
from alia.errors import AliaError, ConfigError, InconsistencyError, PreconditionError
from alia.funring import SpherePoint, hermite_interpolate, linearizing_coordinate, taylor_jet
from alia.kacroots import kac_report_for_config, torsion_of_config
from alia.truncur import eigenspace_decomposition, quotient_certificate
from alia.wildness import wildness_report

logger = logging.getLogger(__name__)

COMMANDS = ("decompose", "quotient", "kac", "wildness", "interpolate", "idealchain")
FORMATS: Dict[str, tuple] = {
    "decompose": ("json", "table"),
    "quotient": ("json", "table"),
    "kac": ("json", "table", "dot"),
    "wildness": ("json", "table"),
    "interpolate": ("json", "table"),
    "idealchain": ("json", "table"),
}
CACHE_ENV = "ALIA_CACHE_DIR"
DEFAULT_NMAX = 30
DEFAULT_CHAIN_DEGREE = 13
DEFAULT_CHAIN_M = 4

EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_INCONSISTENCY = 4


@dataclass
class RunConfig:
    """Validated command-line parameters."""

    command: str
    config: str
    format: str = "json"
    point: Optional[str] = None
    m: Optional[int] = None
    degree: Optional[int] = None
    nmax: int = DEFAULT_NMAX
    out: Optional[str] = None
    log_level: str = "WARNING"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            config=args.config,
            format=args.format,
            point=args.point,
            m=args.m,
            degree=args.degree,
            nmax=args.nmax,
            out=args.out,
            log_level=args.log_level,
        )

    def validate(self) -> None:
        """Check parameter ranges before any computation starts."""
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}", "--command")
        if self.format not in FORMATS[self.command]:
            raise ConfigError(
                f"format {self.format!r} is not available for {self.command}"
                f" (choose from {', '.join(FORMATS[self.command])})",
                "--format",
            )
        if self.m is not None and self.m < 1:
            raise ConfigError("m must be at least 1", "--m")
        if self.degree is not None and self.degree < 0:
            raise ConfigError("degree must be nonnegative", "--degree")
        if self.nmax < 1:
            raise ConfigError("nmax must be at least 1", "--nmax")
        if self.command == "quotient" and self.m is None:
            raise ConfigError("quotient needs --m", "--m")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alia",
        description="Exact computations with automorphic Lie algebras on punctured spheres.",
    )
    parser.add_argument("--config", required=True,
                        help="action config file, or preset:<name>")
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--point", default=None,
                        help="base point x0 (default: the config's base point);"
                             " comma-separated points for interpolate")
    parser.add_argument("--m", type=int, default=None, help="jet order / truncation")
    parser.add_argument("--degree", type=int, default=None, help="filtration degree D")
    parser.add_argument("--nmax", type=int, default=DEFAULT_NMAX,
                        help="largest n of the wildness table")
    parser.add_argument("--format", default="json", choices=("json", "table", "dot"))
    parser.add_argument("--out", default=None, help="write output to this file")
    parser.add_argument("--log-level", default="WARNING",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    return parser


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _point(run: RunConfig, cfg: ActionConfig) -> SpherePoint:
    if run.point is not None:
        try:
            return SpherePoint.parse(run.point)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), "--point") from exc
    if cfg.base_point is None:
        raise ConfigError("no --point given and the config has no base_point", "--point")
    return cfg.base_point


def config_hash(doc: Dict[str, Any]) -> str:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def cached_invariant_basis(cfg: ActionConfig, degree: int) -> FilteredALiA:
    """Invariant basis, read from and written to ``$ALIA_CACHE_DIR`` when set."""
    cache_dir = os.environ.get(CACHE_ENV)
    path: Optional[Path] = None
    if cache_dir:
        path = Path(cache_dir) / f"{config_hash(cfg.document)}-D{degree}.json"
        if path.is_file():
            try:
                algebra = FilteredALiA.from_json(cfg.action, json.loads(path.read_text("utf-8")))
                logger.debug("invariant basis read from cache %s", path)
                return algebra
            except (ValueError, KeyError, AliaError) as exc:
                logger.warning("ignoring unreadable cache file %s: %s", path, exc)
    algebra = invariant_basis(cfg.action, cfg.lie, degree)
    if path is not None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(algebra.to_json()), "utf-8")
        except OSError as exc:
            logger.warning("could not write cache file %s: %s", path, exc)
    return algebra


def _labels(cfg: ActionConfig, vectors: Sequence[Sequence[Any]], t: int) -> List[str]:
    return [jet_label(cfg.lie, tuple(v), t) for v in vectors]


# ---------------------------------------------------------------------------
# Commands. Each returns its output keyed by format.
# ---------------------------------------------------------------------------


Output = Dict[str, Any]


def cmd_decompose(cfg: ActionConfig, run: RunConfig) -> Output:
    """Eigenspaces of the stabilizer generator at the point (or of the torsion)."""
    if run.point is not None:
        x0 = _point(run, cfg)
        stab = stabilizer(cfg.action, x0)
        gamma0, nu0 = stab.generator.lie_matrix, stab.order
        zeta = linearizing_coordinate(x0, stab.generator.mobius).zeta if nu0 > 1 else None
        where = str(x0)
    else:
        gamma0, nu0, zeta = torsion_of_config(cfg)
        where = "torsion"
    blocks = eigenspace_decomposition(gamma0, nu0, zeta)
    doc = {
        "config": cfg.name,
        "at": where,
        "nu0": nu0,
        "blocks": [
            {"exponent": k, "dim": len(vecs), "basis": _labels(cfg, vecs, k)}
            for k, vecs in sorted(blocks.items()) if vecs
        ],
    }
    lines = [f"eigenspaces at {where} (nu0 = {nu0})"]
    for block in doc["blocks"]:
        lines.append(f"  z^{block['exponent']}: dim {block['dim']}  " + ", ".join(block["basis"]))
    return {"json": doc, "table": "\n".join(lines) + "\n"}


def cmd_quotient(cfg: ActionConfig, run: RunConfig) -> Output:
    x0 = _point(run, cfg)
    assert run.m is not None
    start = run.degree if run.degree is not None else max(run.m - 1, 0)
    cert = quotient_certificate(cached_invariant_basis(cfg, start), x0, run.m)
    doc = cert.to_json()
    doc["config"] = cfg.name
    text = (
        f"A / I({x0}, {run.m}) of dimension {cert.quotient.dim}"
        f" (stabilized at degree {cert.quotient.degree}, dims {cert.quotient.dimensions})\n"
        + cert.quotient.algebra.bracket_table()
        + f"\nleading-coefficient isomorphism verified: {cert.verified}\n"
    )
    if not cert.verified:
        raise InconsistencyError(f"leading-coefficient map at {x0}, m={run.m} is not an isomorphism")
    return {"json": doc, "table": text}


def cmd_kac(cfg: ActionConfig, run: RunConfig) -> Output:
    report = kac_report_for_config(cfg, m=run.m)
    doc = report.to_json()
    doc["config"] = cfg.name
    return {"json": doc, "table": report.table(), "dot": report.dot()}


def cmd_wildness(cfg: ActionConfig, run: RunConfig) -> Output:
    x0 = _point(run, cfg)
    report = wildness_report(cfg, x0, nmax=run.nmax, degree=run.degree)
    return {"json": report.to_json(), "table": report.table()}


def cmd_interpolate(cfg: ActionConfig, run: RunConfig) -> Output:
    block = cfg.interpolate
    if block is None:
        raise ConfigError("config has no interpolate block", "$.interpolate")
    raw_points = run.point.split(",") if run.point is not None else list(block["points"])
    targets = list(block["targets"])
    if len(raw_points) != len(targets):
        raise ConfigError(
            f"{len(raw_points)} points for {len(targets)} targets", "$.interpolate.targets"
        )
    try:
        points = [SpherePoint.parse(p.strip() if isinstance(p, str) else p) for p in raw_points]
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "--point") from exc
    m = run.m if run.m is not None else int(block.get("m", 0))
    f = hermite_interpolate(list(zip(points, targets)), m, cfg.action.pole_set)
    jets = [
        {"point": str(p), "jet": [str(c) for c in taylor_jet(f, p, m + 1).coeffs]}
        for p in points
    ]
    doc = {"config": cfg.name, "m": m, "interpolant": str(f), "jets": jets}
    lines = [f"f = {f}"] + [f"  jet at {j['point']}: {', '.join(j['jet'])}" for j in jets]
    return {"json": doc, "table": "\n".join(lines) + "\n"}


def cmd_idealchain(cfg: ActionConfig, run: RunConfig) -> Output:
    x0 = _point(run, cfg)
    mmax = run.m if run.m is not None else DEFAULT_CHAIN_M
    degree = run.degree if run.degree is not None else DEFAULT_CHAIN_DEGREE
    steps = ideal_chain(cached_invariant_basis(cfg, degree), x0, mmax)
    doc = {
        "config": cfg.name,
        "point": str(x0),
        "degree": degree,
        "steps": [{"m": s.m, "dim": s.dim, "codim": s.codim, "strict": s.strict} for s in steps],
    }
    lines = [f"jet ideals at {x0}, degree {degree}", f"{'m':>4}{'dim':>6}{'codim':>7}  strict"]
    lines += [f"{s.m:>4}{s.dim:>6}{s.codim:>7}  {s.strict}" for s in steps]
    return {"json": doc, "table": "\n".join(lines) + "\n"}


HANDLERS: Dict[str, Callable[[ActionConfig, RunConfig], Output]] = {
    "decompose": cmd_decompose,
    "quotient": cmd_quotient,
    "kac": cmd_kac,
    "wildness": cmd_wildness,
    "interpolate": cmd_interpolate,
    "idealchain": cmd_idealchain,
}


def render(run: RunConfig, output: Output) -> str:
    if run.format == "json":
        doc = output["json"]
        try:
            validate_document(doc, run.command)
        except ConfigError as exc:
            raise InconsistencyError(f"{run.command} output violates its schema: {exc}") from exc
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    return output[run.format]


def run_command(run: RunConfig) -> str:
    """Validate, load the config and produce the rendered output."""
    run.validate()
    cfg = build_action_config(read_config_document(run.config))
    logger.info("running %s on %s", run.command, cfg.name or run.config)
    return render(run, HANDLERS[run.command](cfg, run))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    run = RunConfig.from_args(args)
    try:
        text = run_command(run)
    except ConfigError as exc:
        print(f"alia: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InconsistencyError as exc:
        print(f"alia: error: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENCY
    except (PreconditionError, AliaError) as exc:
        print(f"alia: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if run.out:
        Path(run.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
