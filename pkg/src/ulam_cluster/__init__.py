"""Approximate k-median clustering of permutations under the Ulam metric."""

from .clustering import (ApproxConstants, ClusteringResult, Dataset, MedianSet,
                         approx_k_median, approx_k_median_outliers, approx_median,
                         best_from_input, brute_force_k_median, objective,
                         objective_with_outliers)
from .datasets import PlantedSpec, generate, random_dataset
from .estimators import StreamingUlamKMedian, UlamKMedian, check_permutations
from .exceptions import (BudgetExceeded, CyclicGraph, DataError, DimensionMismatch,
                         DimensionZero, EmptyDataset, EmptyMedianSet, EmptySketch,
                         InvalidConfig, NotBijection, ParseError, StreamOverflow, UlamError,
                         VertexRemoved, WrongArity)
from .permutation import (Permutation, lcs_length, lcs_length_oracle, pairwise_distances,
                          read_dataset, ulam_distance, validate, write_dataset)
from .reconstruct import (ReconstructionReport, TournamentGraph, build_tournament,
                          median_reconstruct, remove_cycles, shortest_cycle_through,
                          topological_permutation)
from .streaming import (StreamConfig, StreamingOneMedian, StreamSketch, sketch_init,
                        sketch_query, sketch_update, streaming_1_median)

__version__ = "0.1.0"
