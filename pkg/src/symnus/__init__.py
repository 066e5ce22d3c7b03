"""Symmetric non-uniform sampling and compressed-sensing reconstruction for 2D NMR."""

from .errors import DegenerateInput, FormatError, InvalidParameter
from .grid import asymmetry_residual, ft2d, grid_norms, ift2d, sym_permute
from .metrics import (
    cross_pair_mismatch, evaluate_spectrum, find_peaks, integrate_peaks, linear_fit,
    peak_amplitudes, pearson, rlne,
)
from .montecarlo import MonteCarloConfig, run_monte_carlo, summarize, write_results_csv
from .recon import (
    IstdConfig, L1SolverConfig, ReconResult, istd_reconstruct, l1_objective, l1_reconstruct, shr,
)
from .sampling import (
    NusData,
    PgConfig,
    Schedule,
    build_nusdata,
    count_from_rate,
    gather,
    make_schedule,
    partition_spis,
    pg_1d,
    poisson_sample,
    random_2d,
    scatter,
    scpg_generate,
    woven_pg_2d,
)
from .synth import NoiseSpec, PeakList, add_noise, make_peaklist, normalize_max, synth_fid

__version__ = "0.1.0"
