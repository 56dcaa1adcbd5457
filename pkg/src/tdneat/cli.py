"""Command line entry point (``tdneat`` / ``python -m tdneat``)."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from tdneat import experiment as exp
from tdneat.config import ALGORITHMS, ConfigError, format_config, load_config
from tdneat.genome import GenomeError, deserialize
from tdneat.network import compile_genome, fitness, simulate_free_run
from tdneat.plants import (
    LEARNING, VERIFICATION_1, VERIFICATION_2, DatasetError, ExcitationSpec, exemplary_dataset,
    generate_excitation, load_dataset, load_input, normalize, save_dataset, save_input,
    simulate_exemplary, Dataset,
)
from tdneat.population import evolve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdneat", description="NEAT / dNEAT for delayed dynamic systems")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run one evolution on a dataset")
    p.add_argument("--config")
    p.add_argument("--dataset", required=True)
    p.add_argument("--algo", choices=ALGORITHMS)
    p.add_argument("--generations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("experiment", help="repeated calls of both algorithms with an MSE report")
    p.add_argument("--config")
    p.add_argument("--learning", required=True)
    p.add_argument("--verify", nargs="*", default=[])
    p.add_argument("--calls", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--algo", choices=ALGORITHMS, action="append",
                   help="restrict to one algorithm (repeatable); default runs both")
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate-plant", help="drive the exemplary delayed plant")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--normalize", action="store_true")

    p = sub.add_parser("gen-input", help="piecewise-constant excitation signal")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--hold", type=int, required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen-datasets", help="write the default learning and verification sets")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="MSE and fitness of a saved genome on a dataset")
    p.add_argument("--genome", required=True)
    p.add_argument("--dataset", required=True)
    return parser


def _evolve(args) -> None:
    config = load_config(args.config, algo=args.algo, generations=args.generations, seed=args.seed)
    dataset = load_dataset(args.dataset)
    result = evolve(config, dataset)
    out = Path(args.out)
    exp.write_generation_log(result, out / "generation_log.csv")
    exp.write_winner(result.winner, out / "winner.json")
    (out / "config.txt").write_text(format_config(config), encoding="utf-8")
    w = result.winner
    print(f"{config.algo}: winner fitness {w.fitness:.10g} (MSE {-w.fitness / 1000:.6g}), "
          f"du={w.du} dy={w.dy}, {len(w.nodes)} nodes, {result.wall_time:.1f}s")


def _experiment(args) -> None:
    config = load_config(args.config, calls=args.calls, generations=args.generations, seed=args.seed)
    learning = load_dataset(args.learning)
    verify = [load_dataset(p) for p in args.verify]
    algorithms = tuple(dict.fromkeys(args.algo)) if args.algo else ALGORITHMS
    report = exp.run_experiment(config, learning, verify, algorithms)
    path = exp.write_experiment(report, config, args.out)
    print(exp.format_table(report), end="")
    print(f"report written to {path}")


def _simulate_plant(args) -> None:
    u = load_input(args.input)
    x = simulate_exemplary(u)
    if args.normalize:
        x = normalize(x)
    save_dataset(Dataset(u, x, "plant"), args.out)


def _gen_input(args) -> None:
    spec = ExcitationSpec(args.length, args.hold, args.lo, args.hi, args.seed)
    save_input(generate_excitation(spec), args.out)


def _gen_datasets(args) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, spec in (("learning", LEARNING), ("verify1", VERIFICATION_1), ("verify2", VERIFICATION_2)):
        save_dataset(exemplary_dataset(spec, name), out / f"{name}.csv")


def _eval(args) -> None:
    genome = deserialize(Path(args.genome).read_text(encoding="utf-8"))
    dataset = load_dataset(args.dataset)
    f = fitness(simulate_free_run(compile_genome(genome), dataset.u), dataset.t)
    print(f"MSE {0.0 - f / 1000:.17g}")
    print(f"fitness {f:.17g}")


COMMANDS = {
    "evolve": _evolve,
    "experiment": _experiment,
    "simulate-plant": _simulate_plant,
    "gen-input": _gen_input,
    "gen-datasets": _gen_datasets,
    "eval": _eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ConfigError, DatasetError, GenomeError, OSError, ValueError, RuntimeError) as exc:
        print(f"tdneat {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
