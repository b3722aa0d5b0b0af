"""Command-line interface.

Three subcommands:

* ``verify``  -- run every acceptance criterion and print one row each;
  exits nonzero if any criterion fails.  A reduced budget (``--scale`` /
  ``--trials``) downgrades passing rows to "inconclusive".
* ``run <experiment>`` -- run one registered experiment; extra ``--key
  value`` pairs override its parameters (unknown keys are rejected).
* ``dump-dist <ctor> <params...>`` -- write a shipped distribution in the
  text formats understood by the loaders.

Global behavior: all randomness flows from ``--seed``; identical
configuration and seed give byte-identical output.  ``--config FILE`` reads
``key = value`` lines providing defaults that explicit flags override.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .distributions import (dump_explicit_dist, dump_zvector, kn_cycle_dist,
                            pair_singleton_dist, twise_symmetric)
from .experiments import EXPERIMENTS, ExperimentError, run_experiment
from .harness import rows_to_csv, rows_to_json

_GLOBAL_KEYS = ("seed", "trials", "format", "out", "scale")


@dataclass
class ExperimentConfig:
    """Merged configuration: file defaults, overridden by flags."""
    seed: int = 0
    trials: int = 0           # 0 = experiment default
    format: str = "csv"
    out: str = ""
    scale: float = 1.0
    params: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path):
        cfg = cls()
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ExperimentError(
                        f"{path}:{lineno}: expected 'key = value'")
                key, val = (s.strip() for s in line.split("=", 1))
                cfg.set(key, val)
        return cfg

    def set(self, key, val):
        try:
            if key == "seed":
                self.seed = int(val)
            elif key == "trials":
                self.trials = int(val)
            elif key == "format":
                if val not in ("csv", "json"):
                    raise ExperimentError(
                        f"format must be csv or json, not {val!r}")
                self.format = val
            elif key == "out":
                self.out = str(val)
            elif key == "scale":
                self.scale = float(val)
            else:
                self.params[key] = val
        except (TypeError, ValueError) as ex:
            raise ExperimentError(f"bad value for {key}: {ex}") from ex

    def apply_flags(self, args, extra_params=None):
        for key in _GLOBAL_KEYS:
            val = getattr(args, key, None)
            if val is not None:
                self.set(key, val)
        for key, val in (extra_params or {}).items():
            if key in _GLOBAL_KEYS:
                self.set(key, val)
            else:
                self.params[key] = val
        return self


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _cmd_verify(cfg):
    from .acceptance import run_all
    scale = cfg.scale
    if cfg.trials:
        scale = min(scale, cfg.trials / 10 ** 4)
    if cfg.params:
        raise ExperimentError(
            f"verify takes no experiment parameters: {sorted(cfg.params)}")
    results = run_all(scale=scale, seed=cfg.seed)
    rows = [{"criterion": r.cid, "status": r.status, "title": r.title,
             "detail": r.detail} for r in results]
    for r in results:
        print(r.line())
    n_fail = sum(r.status == "fail" for r in results)
    n_inc = sum(r.status == "inconclusive" for r in results)
    print(f"verify: {len(results) - n_fail - n_inc} pass, {n_inc} "
          f"inconclusive, {n_fail} fail (scale={scale:g}, seed={cfg.seed})")
    if cfg.out:
        text = rows_to_csv(rows) if cfg.format == "csv" else rows_to_json(rows)
        _emit(text, cfg.out)
    return 1 if n_fail else 0


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _cmd_run(cfg, name):
    overrides = dict(cfg.params)
    if cfg.trials and "trials" in EXPERIMENTS[name].defaults \
            and "trials" not in overrides:
        overrides["trials"] = cfg.trials
    res = run_experiment(name, overrides, seed=cfg.seed)
    text = res.to_csv() if cfg.format == "csv" else res.to_json()
    _emit(text, cfg.out)
    return 0 if res.ok else 1


# ---------------------------------------------------------------------------
# dump-dist
# ---------------------------------------------------------------------------

_CTORS = {
    "twise": ("n t", lambda p: twise_symmetric(int(p[0]), int(p[1]))),
    "kn-cycle": ("n", lambda p: kn_cycle_dist(int(p[0]))),
    "pair-singleton": ("n", lambda p: pair_singleton_dist(int(p[0]))),
    "offline-fixture": ("", lambda p: _offline()),
}


def _offline():
    from .fixtures import offline_crs_dist
    return offline_crs_dist()


def _cmd_dump(cfg, ctor, params):
    if ctor not in _CTORS:
        raise ExperimentError(
            f"unknown constructor {ctor!r}; choose from {sorted(_CTORS)}")
    argspec, fn = _CTORS[ctor]
    want = len(argspec.split()) if argspec else 0
    if len(params) != want:
        raise ExperimentError(
            f"{ctor} takes {want} parameter(s): {argspec or '(none)'}")
    D = fn(params)
    text = dump_zvector(D.z) if hasattr(D, "z") else dump_explicit_dist(D)
    _emit(text, cfg.out)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ocrskit",
        description="contention-resolution schemes under limited "
                    "independence: experiments and claim verification")
    parser.add_argument("--config", help="key = value defaults file")
    sub = parser.add_subparsers(dest="cmd", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("csv", "json"), default=None)

    v = sub.add_parser("verify", parents=[common],
                       help="run all acceptance criteria")
    v.add_argument("--scale", type=float, default=None,
                   help="budget multiplier; < 1 makes passes inconclusive")

    r = sub.add_parser("run", parents=[common],
                       help="run one registered experiment")
    r.add_argument("name", choices=sorted(EXPERIMENTS))

    d = sub.add_parser("dump-dist", parents=[common],
                       help="write a shipped distribution as text")
    d.add_argument("ctor")
    d.add_argument("params", nargs="*")

    l = sub.add_parser("list", parents=[common],
                       help="list registered experiments")
    del l
    return parser


def _extra_pairs(rest):
    """Parse trailing ``--key value`` / ``--key=value`` overrides."""
    out = {}
    i = 0
    while i < len(rest):
        tok = rest[i]
        if not tok.startswith("--"):
            raise ExperimentError(f"expected --key value, got {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            i += 1
            if i >= len(rest):
                raise ExperimentError(f"flag --{key} needs a value")
            val = rest[i]
        out[key.replace("-", "_")] = val
        i += 1
    return out


def main(argv=None):
    parser = _build_parser()
    args, rest = parser.parse_known_args(argv)
    try:
        extra = _extra_pairs(rest)
        cfg = ExperimentConfig.from_file(args.config) if args.config \
            else ExperimentConfig()
        cfg.apply_flags(args, extra)
        if args.cmd == "verify":
            if getattr(args, "scale", None) is not None:
                cfg.scale = args.scale
            return _cmd_verify(cfg)
        if args.cmd == "run":
            return _cmd_run(cfg, args.name)
        if args.cmd == "dump-dist":
            return _cmd_dump(cfg, args.ctor, list(args.params))
        if args.cmd == "list":
            for name in sorted(EXPERIMENTS):
                print(f"{name}: {EXPERIMENTS[name].claim}")
            return 0
        parser.error(f"unknown command {args.cmd}")
    except ExperimentError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
