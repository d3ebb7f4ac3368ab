"""Searches, Monte Carlo suites, result records and the command-line interface."""

from .montecarlo import MonteCarloConfig, montecarlo_suite
from .records import CANDIDATE, ResultRecord, RecordWriter, read_records
from .search import ExperimentConfig, replay, run_search, search_hypergraph_conjecture, search_matrix_conjecture

__all__ = [
    "CANDIDATE", "ExperimentConfig", "MonteCarloConfig", "RecordWriter", "ResultRecord",
    "montecarlo_suite", "read_records", "replay", "run_search",
    "search_hypergraph_conjecture", "search_matrix_conjecture",
]
