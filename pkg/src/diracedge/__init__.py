"""Edge states of a two-dimensional Dirac operator with a domain-wall mass."""

from .analysis import ErrorSeries, PowerLawFit, chirality_sign, edge_centroid, error_vs_ansatz, power_law_fit
from .ansatz import (ChiProfile, CirclePhi, CircleSolution, CurvedSolution, GaussianEnvelope,
                     PeriodicBump, PlaneWaveSolution, StraightSolution)
from .config import ConfigError, RunConfig, parse_config
from .fields import (AlphaField, GridSpec, SpinorField, alpha_to_beta, beta_to_alpha, energy,
                     l2_distance, l2_norm, make_grid)
from .mass import (CircleEdge, MassModel, PerturbedEdge, SinePerturbation, StraightEdge,
                   TransitionProfile, eval_mass, sample_mass)
from .propagator import NumericalBlowup, evolve, strang_step
from .spectrum1d import Dirac1DProblem, dispersion_scan, gap_mode

__version__ = "0.1.0"
