"""Paired NEAT vs dNEAT runs on the default Application-1 data.

Prints the MSE reduction at a checkpoint generation and the final winner MSE
for every seed, plus the median over seeds per algorithm.

    python scripts/desk_scale.py --generations 500 --checkpoint 300 --seeds 1 2 3 4 5
"""
import argparse
import statistics
import time

from tdneat.config import Config
from tdneat.plants import default_datasets
from tdneat.population import evolve


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--generations", type=int, default=500)
    parser.add_argument("--checkpoint", type=int, default=300)
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    parser.add_argument("--algo", nargs="+", default=["neat", "dneat"])
    args = parser.parse_args()

    learning, _ = default_datasets()
    finals = {}
    for algo in args.algo:
        for seed in args.seeds:
            start = time.perf_counter()
            result = evolve(Config(algo=algo, seed=seed, generations=args.generations), learning)
            first = result.log[0].best_fitness
            cp = result.log[min(args.checkpoint, len(result.log) - 1)].best_fitness
            final = result.winner.fitness
            finals.setdefault(algo, []).append(-final / 1000)
            print(f"{algo:5s} seed {seed}: gen0 MSE {-first / 1000:.3e}  "
                  f"gen{args.checkpoint} MSE {-cp / 1000:.3e} (x{first / cp:.1f})  "
                  f"final MSE {-final / 1000:.3e}  du={result.winner.du} dy={result.winner.dy}  "
                  f"{time.perf_counter() - start:.0f}s", flush=True)
    for algo, values in finals.items():
        print(f"{algo}: median winner MSE {statistics.median(values):.4e}")


if __name__ == "__main__":
    main()
