"""Command line entry point.

Subcommands::

    conemod example  [--config cfg.json] [--seed N] [--out-dir DIR]
    conemod suites   [--config cfg.json] [--seed N] [--out-dir DIR] [--n N]
    conemod solve    --map example_t --lambda 2 --alpha 2 --beta 1 --k 0.5,4 --tol 1e-10 --x0 0,0 [--trace out.csv]
    conemod witness  --map example_t --lambda 2 --c 1,1

``example`` writes ``summary.json`` and ``trace.csv``; ``suites`` writes
``suite_report.json``.  Exit status is 0 exactly when the written summary
has ``"pass": true``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import ALGEBRAS, get_algebra, spectral_radius_estimate
from .cone import (
    CONES,
    element_sampler,
    get_cone,
    normality_estimate,
    normality_report,
    ordered_pair_sampler,
    verify_cone_axioms,
)
from .fixpoint import (
    MAPS,
    ContractionSpec,
    FixedPointError,
    certify_contraction,
    get_map,
    picard_solve,
    uniqueness_probe,
)
from .modular import (
    MODULARS,
    SequenceTrace,
    check_axioms,
    check_delta2,
    check_f_norm_properties,
    check_monotonicity,
    check_scalar_modular,
    get_modular,
)
from .report import jsonable
from .scalarize import ScalarizationParams, non_contraction_witness, norm_modular, scalar_modular

log = logging.getLogger("conemod")

SCHEMA = 1


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    algebra: str = "dual_pair"
    cone: str = "quadrant"
    modular: str = "abs_pair"
    map: str = "example_t"
    lam: float = 2.0
    alpha: float = 2.0
    beta: float = 1.0
    # the worked example's k=(1/2, lam) fails the contraction inequality for every
    # alpha > beta; (1/2, alpha*lam/beta) is the smallest second coordinate that holds
    k: list[float] = field(default_factory=lambda: [0.5, 4.0])
    x0: list[float] = field(default_factory=lambda: [0.0, 0.0])
    c: list[float] = field(default_factory=lambda: [1.0, 1.0])
    tol: float = 1e-10
    max_iter: int = 1000
    uniqueness_tol: float = 1e-8
    n_starts: int = 5
    start_box: float = 10.0
    n_samples: int = 10_000
    pair_box: float = 50.0
    spectral_n_max: int = 1000
    spectral_tol: float = 1e-3
    delta2_eps: float = 1e-6
    fnorm_tol: float = 1e-10
    seed: int = 42
    out_dir: str = "out"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def validate(self) -> None:
        registries = {"algebra": (self.algebra, ALGEBRAS), "cone": (self.cone, CONES),
                      "modular": (self.modular, MODULARS), "map": (self.map, MAPS)}
        for what, (tag, reg) in registries.items():
            if tag not in reg:
                raise ConfigError(f"unregistered {what} tag {tag!r}")
        if not (self.beta > 0 and self.alpha > self.beta):
            raise ConfigError(f"need alpha > beta > 0, got alpha={self.alpha}, beta={self.beta}")
        for name in ("tol", "uniqueness_tol", "spectral_tol", "delta2_eps", "fnorm_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.n_samples < 0 or self.max_iter < 1 or self.n_starts < 1:
            raise ConfigError("n_samples must be >= 0, max_iter and n_starts >= 1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def recorded(self) -> dict:
        """Config as stored in summaries; the output path is left out so reruns elsewhere compare equal."""
        d = self.to_dict()
        del d["out_dir"]
        return d


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# run_example

def run_example(cfg: RunConfig, out_dir: str | Path | None = None) -> tuple[int, dict]:
    """Run the worked example end to end and write ``summary.json`` and ``trace.csv``.

    Stages: spectral radius of k, contraction certificate, Picard solve,
    uniqueness probe, non-contraction witness for the scalarized modular.
    """
    cfg.validate()
    out = Path(out_dir or cfg.out_dir)
    rng = np.random.default_rng(cfg.seed)
    A = get_algebra(cfg.algebra)
    cone = get_cone(cfg.cone)
    rho = get_modular(cfg.modular, cone)
    T = get_map(cfg.map, lam=cfg.lam)
    k = A(cfg.k)
    spec = ContractionSpec(k, cfg.alpha, cfg.beta)

    summary: dict = {"schema": SCHEMA, "seed": cfg.seed, "config": cfg.recorded(), "stages": {}}
    stages = summary["stages"]

    def finish(failed: str | None) -> tuple[int, dict]:
        summary["pass"] = failed is None
        summary["failed_stage"] = failed
        _dump(summary, out / "summary.json")
        if failed:
            log.error("stage %s failed", failed)
        return (0 if failed is None else 1), summary

    est = spectral_radius_estimate(k, cfg.spectral_n_max, cfg.spectral_tol)
    stages["spectral_radius"] = {
        "pass": est.estimate < 1.0 and cone.contains(k),
        "estimate": est.estimate,
        "n": est.n,
        "k_in_cone": bool(cone.contains(k)),
        "tail": est.tail[-4:],
    }
    if not stages["spectral_radius"]["pass"]:
        return finish("spectral_radius")

    rep = certify_contraction(T, spec, rho, cone, _pair_sampler(cfg), cfg.n_samples, rng)
    stages["contraction"] = rep.to_dict()
    if not rep.ok:
        return finish("contraction")

    try:
        res = picard_solve(T, cfg.x0, spec, rho, cone, cfg.tol, cfg.max_iter)
    except FixedPointError as exc:
        stages["picard"] = {"pass": False, "error": str(exc)}
        if exc.trace is not None:
            out.mkdir(parents=True, exist_ok=True)
            exc.trace.to_csv(out / "trace.csv")
        return finish("picard")
    out.mkdir(parents=True, exist_ok=True)
    res.trace.to_csv(out / "trace.csv")
    stages["picard"] = {
        "pass": res.residual <= res.residual_limit,
        "point": res.point,
        "iterations": res.iterations,
        "fixed_point_residual": res.residual,
        "step_residual": res.step_residual,
        "final_apriori_bound": res.apriori_bounds[-1],
        "alpha0": res.trace.alpha0,
        "stop_rule": res.trace.stop_rule,
    }

    starts = [np.asarray(cfg.x0, float)] + [
        rng.uniform(-cfg.start_box, cfg.start_box, size=rho.dim) for _ in range(cfg.n_starts - 1)
    ]
    try:
        uq = uniqueness_probe(T, spec, rho, starts, cone, cfg.uniqueness_tol, cfg.tol, cfg.max_iter)
        stages["uniqueness"] = uq.to_dict()
    except FixedPointError as exc:
        stages["uniqueness"] = {"pass": False, "error": str(exc)}
        return finish("uniqueness")
    if not uq.ok:
        return finish("uniqueness")

    params = ScalarizationParams(A(cfg.c), cone)
    w = non_contraction_witness(T, scalar_modular(rho, params))
    stages["non_contraction_witness"] = {"pass": w is not None, "c": cfg.c, "witness": w.to_dict() if w else None}
    if w is None:
        return finish("non_contraction_witness")
    return finish(None)


def _pair_sampler(cfg: RunConfig):
    box = cfg.pair_box

    def draw(rng):
        return rng.uniform(-box, box, size=2), rng.uniform(-box, box, size=2)

    return draw


# ---------------------------------------------------------------------------
# run_suites

def run_suites(cfg: RunConfig, out_dir: str | Path | None = None) -> tuple[int, dict]:
    """Run the sampled axiom checkers on the configured instances; write ``suite_report.json``."""
    cfg.validate()
    out = Path(out_dir or cfg.out_dir)
    rng = np.random.default_rng(cfg.seed)
    A = get_algebra(cfg.algebra)
    cone = get_cone(cfg.cone)
    rho = get_modular(cfg.modular, cone)
    n = cfg.n_samples

    reports = [
        verify_cone_axioms(cone, element_sampler(A), n, rng),
        normality_report(normality_estimate(cone, ordered_pair_sampler(element_sampler(A)), n, rng)),
        check_axioms(rho, None, n, rng),
        check_monotonicity(rho, None, n, rng),
        check_f_norm_properties(rho, None, n, rng, cfg.fnorm_tol),
        check_scalar_modular(norm_modular(rho), None, n, rng, rho.dim, name=f"norm_modular[{rho.tag}]"),
    ]
    traces = []
    for _ in range(min(n, 32)):
        x = rng.uniform(-1, 1, size=rho.dim)
        traces.append(SequenceTrace([x * 2.0**-j for j in range(48)]))
    reports.append(check_delta2(rho, traces, cfg.delta2_eps))

    warnings = []
    if n == 0:
        warnings.append("no samples: n_samples=0, all checks pass vacuously")
        log.warning(warnings[-1])
    summary = {
        "schema": SCHEMA,
        "seed": cfg.seed,
        "instances": {"algebra": cfg.algebra, "cone": cfg.cone, "modular": cfg.modular},
        "n_samples": n,
        "checks": [r.to_dict() for r in reports],
        "warnings": warnings,
    }
    summary["pass"] = all(r.ok for r in reports)
    _dump(summary, out / "suite_report.json")
    for r in reports:
        if not r.ok:
            v = r.violations[0]
            log.error("%s: %s violated, witness %s", r.name, v.axiom, jsonable(v.witness))
    return (0 if summary["pass"] else 1), summary


# ---------------------------------------------------------------------------
# argument parsing

def _floats(s: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def _config_from_args(args) -> RunConfig:
    d = {}
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
    if args.seed is not None:
        d["seed"] = args.seed
    if args.out_dir is not None:
        d["out_dir"] = args.out_dir
    if getattr(args, "n", None) is not None:
        d["n_samples"] = args.n
    return RunConfig.from_dict(d)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conemod", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("example", "suites"):
        s = sub.add_parser(name)
        s.add_argument("--config")
        s.add_argument("--seed", type=int)
        s.add_argument("--out-dir")
        if name == "suites":
            s.add_argument("--n", type=int, help="samples per check")

    s = sub.add_parser("solve", help="Picard-solve one map and print the result as JSON")
    s.add_argument("--map", default="example_t", choices=sorted(MAPS))
    s.add_argument("--lambda", dest="lam", type=float, default=2.0)
    s.add_argument("--alpha", type=float, default=2.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--k", type=_floats, default=[0.5, 4.0])
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--x0", type=_floats, default=[0.0, 0.0])
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--trace")

    s = sub.add_parser("witness", help="search for a pair showing T is not rho*-nonexpansive")
    s.add_argument("--map", default="example_t", choices=sorted(MAPS))
    s.add_argument("--lambda", dest="lam", type=float, default=2.0)
    s.add_argument("--c", type=_floats, default=[1.0, 1.0])
    return p


def _cmd_solve(args) -> int:
    cone = get_cone("quadrant")
    rho = get_modular("abs_pair", cone)
    try:
        spec = ContractionSpec(cone.algebra(args.k), args.alpha, args.beta)
    except ValueError as exc:
        print(json.dumps({"pass": False, "error": str(exc)}))
        return 2
    T = get_map(args.map, lam=args.lam)
    try:
        res = picard_solve(T, args.x0, spec, rho, cone, args.tol, args.max_iter)
    except FixedPointError as exc:
        print(json.dumps({"pass": False, "error": str(exc)}))
        return 1
    if args.trace:
        res.trace.to_csv(args.trace)
    print(json.dumps(jsonable({
        "pass": True,
        "point": res.point,
        "iterations": res.iterations,
        "fixed_point_residual": res.residual,
        "step_residual": res.step_residual,
        "final_apriori_bound": res.apriori_bounds[-1],
        "stop_rule": res.trace.stop_rule,
    }), sort_keys=True))
    return 0


def _cmd_witness(args) -> int:
    cone = get_cone("quadrant")
    rho = get_modular("abs_pair", cone)
    try:
        params = ScalarizationParams(cone.algebra(args.c), cone)
    except ValueError as exc:
        print(json.dumps({"found": False, "error": str(exc)}))
        return 2
    T = get_map(args.map, lam=args.lam)
    w = non_contraction_witness(T, scalar_modular(rho, params))
    print(json.dumps({"found": w is not None, "c": args.c, "witness": w.to_dict() if w else None}, sort_keys=True))
    return 0 if w else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "witness":
        return _cmd_witness(args)
    try:
        cfg = _config_from_args(args)
    except (ConfigError, TypeError) as exc:
        log.error("invalid config: %s", exc)
        return 2
    runner = run_example if args.command == "example" else run_suites
    status, summary = runner(cfg)
    log.info("%s: %s (written to %s)", args.command, "pass" if summary["pass"] else "FAIL", cfg.out_dir)
    return status


if __name__ == "__main__":
    sys.exit(main())
