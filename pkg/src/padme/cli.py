"""Command line: ``padme run``, ``padme oracle``, ``padme sweep``."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields, replace
from pathlib import Path

from padme.agent import AgentConfig
from padme.harness import ExperimentConfig, oracle_table, run_experiment
from padme.wrr import ConfigurationError

log = logging.getLogger("padme")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


_AGENT_TYPES = {"hidden": _ints, "actor_hidden": _ints, "actor_baseline": str, "center_advantage": _bool,
                "buffer_size": int, "batch_size": int}


def add_config_flags(p: argparse.ArgumentParser, require_seed_out: bool):
    p.add_argument("--config", type=Path, help="YAML/JSON file with ExperimentConfig fields")
    p.add_argument("--loss-probs", type=_floats, help="per-path loss probabilities, e.g. 0.01,0.03,0.05")
    p.add_argument("--K", type=int)
    p.add_argument("--cycles-per-interval", type=int)
    p.add_argument("--interval-s", type=float)
    p.add_argument("--threshold", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--return-window", type=int)
    if require_seed_out:
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--out", type=Path, required=True)
    g = p.add_argument_group("agent")
    for f in fields(AgentConfig):
        g.add_argument(f"--{f.name.replace('_', '-')}", dest=f"agent_{f.name}",
                       type=_AGENT_TYPES.get(f.name, float))


def build_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    top = {}
    for name in ("loss_probs", "K", "cycles_per_interval", "interval_s", "threshold", "iterations",
                 "return_window", "seed", "out"):
        value = getattr(args, name, None)
        if value is not None:
            top[name] = str(value) if name == "out" else value
    agent = {f.name: getattr(args, f"agent_{f.name}") for f in fields(AgentConfig)
             if getattr(args, f"agent_{f.name}", None) is not None}
    cfg = replace(cfg, agent=replace(cfg.agent, **agent), **top)
    cfg.validate()
    return cfg


def cmd_run(args) -> int:
    cfg = build_config(args)
    recs = run_experiment(cfg)
    last = recs[-1]
    print(f"wrote {cfg.out}: {len(recs)} iterations, final class {last.action.cls.label} "
          f"perm {''.join(map(str, last.action.perm))}, windowed return {last.windowed_return:.3f}")
    return 0


def cmd_oracle(args) -> int:
    rows = oracle_table(args.plrs, args.K, args.threshold)
    print("index,class,perm,omega,f_bar,info_loss,feasible,ordered")
    for r in rows:
        print(f"{r['index']},{r['class']},{''.join(map(str, r['perm']))},"
              f"{'/'.join(map(str, r['omega']))},{r['f_bar']},{r['info_loss']!r},"
              f"{int(r['feasible'])},{int(r['ordered'])}")
    return 0


def _one(cfg: ExperimentConfig) -> str:
    log.debug("running seed %d -> %s", cfg.seed, cfg.out)
    run_experiment(cfg)
    return cfg.out


def cmd_sweep(args) -> int:
    base = build_config(args)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [replace(base, seed=s, out=str(args.out_dir / f"seed{s:03d}.csv")) for s in args.seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            done = list(pool.map(_one, jobs))
    else:
        done = [_one(j) for j in jobs]
    for path in done:
        print(path)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padme", description="Multipath redundancy scheduler experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write its CSV trace")
    add_config_flags(run, require_seed_out=True)
    run.set_defaults(func=cmd_run)

    orc = sub.add_parser("oracle", help="print the analytic loss of every action")
    orc.add_argument("--plrs", type=_floats, required=True)
    orc.add_argument("--K", type=int, default=100)
    orc.add_argument("--threshold", type=float, default=0.005)
    orc.set_defaults(func=cmd_oracle)

    sw = sub.add_parser("sweep", help="run several seeds, one CSV per seed")
    add_config_flags(sw, require_seed_out=False)
    sw.add_argument("--seeds", type=_ints, default=tuple(range(5)))
    sw.add_argument("--out-dir", type=Path, required=True)
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"padme: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
