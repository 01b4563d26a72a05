"""Coloring algorithms and their ground-truth diagnostics."""

from .clustering import spectral_clustering, spectral_k_clustering
from .diagnostics import DiagnosticReport, approx_distance, compute_SB, diagnose, partial_disagreement
from .drivers import ColoringResult, StageTrace, color_AR, color_RA, complete_by_guessing
from .params import BruteForceAbort, ClusteringFailed, PipelineParams, estimate_degree
from .sparse3 import NotThreeColorable, sparse_3_color
from .stages import (brute_force_components, cautious_uncolor, free_components, iterative_recolor,
                     neighbor_color_counts, one_step_refine, safe_recolor)
