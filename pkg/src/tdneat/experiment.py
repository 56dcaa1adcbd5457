"""Multi-call experiments: winners, MSE tables and per-generation curves."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path

from tdneat.config import ALGORITHMS, Config, format_config
from tdneat.genome import Genome, serialize
from tdneat.network import compile_genome, mse, simulate_free_run
from tdneat.plants import Dataset
from tdneat.population import LogEntry, RunResult, evolve

log = logging.getLogger(__name__)

STATISTICS = ("best", "worst", "average")
_DESCRIPTIONS = {
    "best": "the best of the winners",
    "worst": "the worst of the winners",
    "average": "the average value of the winners",
}


@dataclass
class ExperimentReport:
    algorithms: list[str]
    datasets: list[str]
    # (algorithm, dataset label) -> winner MSE per call
    winner_mse: dict[tuple[str, str], list[float]]
    winners: dict[str, list[Genome]] = field(default_factory=dict)
    runs: dict[str, list[RunResult]] = field(default_factory=dict)

    def cell(self, algorithm: str, dataset: str) -> dict[str, float]:
        return summarize(self.winner_mse[algorithm, dataset])

    def cells(self):
        for i, ds in enumerate(self.datasets):
            phase = "learning" if i == 0 else f"verification-{i}"
            for algo in self.algorithms:
                stats = self.cell(algo, ds)
                for name in STATISTICS:
                    yield phase, ds, algo, name, stats[name]

    def curves(self, algorithm: str) -> list[tuple[int, float, float]]:
        """Per generation: mean over calls of population-mean and of best fitness."""
        logs = [r.log for r in self.runs[algorithm]]
        rows = []
        for entries in zip(*logs):
            rows.append((entries[0].generation,
                         sum(e.mean_fitness for e in entries) / len(entries),
                         sum(e.best_fitness for e in entries) / len(entries)))
        return rows


def summarize(values: list[float]) -> dict[str, float]:
    if not values:
        raise ValueError("no winner values to summarize")
    return {"best": min(values), "worst": max(values), "average": sum(values) / len(values)}


def winner_mse(genome: Genome, dataset: Dataset) -> float:
    return mse(simulate_free_run(compile_genome(genome), dataset.u), dataset.t)


def run_experiment(config: Config, learning: Dataset, verifications: list[Dataset],
                   algorithms=ALGORITHMS, threads: int | None = None) -> ExperimentReport:
    """``config.calls`` paired runs per algorithm; call ``i`` uses seed ``config.seed + i``."""
    datasets = [learning, *verifications]
    labels = [ds.label or ("learning" if i == 0 else f"verification-{i}")
              for i, ds in enumerate(datasets)]
    if len(set(labels)) != len(labels):
        labels = [f"{i}:{label}" for i, label in enumerate(labels)]
    report = ExperimentReport(list(algorithms), labels, {})
    for algo in algorithms:
        runs = []
        for call in range(config.calls):
            cfg = config.replace(algo=algo, seed=config.seed + call)
            try:
                result = evolve(cfg, learning, threads=threads)
            except Exception as exc:
                raise RuntimeError(f"{algo} call {call} (seed {cfg.seed}) failed: {exc}") from exc
            log.info("%s call %d: winner fitness %.6g in %.1fs", algo, call,
                     result.winner.fitness, result.wall_time)
            runs.append(result)
        report.runs[algo] = runs
        report.winners[algo] = [r.winner for r in runs]
        for label, ds in zip(labels, datasets):
            report.winner_mse[algo, label] = [winner_mse(r.winner, ds) for r in runs]
    return report


# -- output files ------------------------------------------------------------

LOG_HEADER = [f.name for f in fields(LogEntry)]


def _open(path):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _num(v) -> str:
    return format(v, ".17g") if isinstance(v, float) else str(v)


def write_generation_log(result: RunResult, path) -> None:
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOG_HEADER)
        for e in result.log:
            writer.writerow([_num(getattr(e, name)) for name in LOG_HEADER])


def read_generation_log(path) -> list[dict[str, float]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_winner(genome: Genome, path) -> None:
    with _open(path) as fh:
        fh.write(serialize(genome))


def format_table(report: ExperimentReport) -> str:
    """Aligned text table, MSE scaled by 1e2."""
    header = ("Phase", "Dataset", "Algorithm", "Description", "Value (x10^-2)")
    rows = [(phase, ds, algo.upper() if algo == "neat" else "dNEAT", _DESCRIPTIONS[stat], f"{value * 100:.6g}")
            for phase, ds, algo, stat, value in report.cells()]
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    line = "+".join("-" * (w + 2) for w in widths)
    out = [line, " | ".join(h.ljust(w) for h, w in zip(header, widths)), line]
    last_phase = None
    for r in rows:
        if last_phase is not None and r[0] != last_phase:
            out.append(line)
        last_phase = r[0]
        out.append(" | ".join(c.rjust(w) if i == 4 else c.ljust(w)
                              for i, (c, w) in enumerate(zip(r, widths))))
    out.append(line)
    return "\n".join(out) + "\n"


def write_report(report: ExperimentReport, path) -> None:
    """CSV at ``path`` and the aligned text table next to it with a ``.txt`` suffix."""
    path = Path(path)
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["phase", "dataset", "algorithm", "statistic", "mse"])
        for phase, ds, algo, stat, value in report.cells():
            writer.writerow([phase, ds, algo, stat, _num(value)])
    with _open(path.with_suffix(".txt")) as fh:
        fh.write(format_table(report))


def write_curves(report: ExperimentReport, path) -> None:
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm", "generation", "mean_population_fitness", "mean_best_fitness"])
        for algo in report.algorithms:
            for gen, mean_fit, best_fit in report.curves(algo):
                writer.writerow([algo, gen, _num(mean_fit), _num(best_fit)])


def write_experiment(report: ExperimentReport, config: Config, out_dir) -> Path:
    out = Path(out_dir)
    write_report(report, out / "report.csv")
    write_curves(report, out / "curves.csv")
    with _open(out / "config.txt") as fh:
        fh.write(format_config(config))
    for algo in report.algorithms:
        for call, result in enumerate(report.runs[algo]):
            call_dir = out / algo / f"call-{call:02d}"
            write_generation_log(result, call_dir / "generation_log.csv")
            write_winner(result.winner, call_dir / "winner.json")
    return out / "report.csv"
