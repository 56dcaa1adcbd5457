"""Neuroevolution of NARX-style recurrent networks with evolvable delay levels."""
from tdneat.config import Config, load_config
from tdneat.genome import Genome, InnovationRegistry, compatibility_distance, initial_genome
from tdneat.network import compile_genome, fitness, simulate_free_run, step
from tdneat.plants import Dataset, load_dataset, save_dataset, simulate_exemplary
from tdneat.population import RunResult, evolve

__all__ = [
    "Config", "Dataset", "Genome", "InnovationRegistry", "RunResult", "compatibility_distance",
    "compile_genome", "evolve", "fitness", "initial_genome", "load_config", "load_dataset",
    "save_dataset", "simulate_exemplary", "simulate_free_run", "step",
]
