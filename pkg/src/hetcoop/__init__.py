"""RSS-threshold BS clustering in multi-tier Poisson networks: rate, power and their trade-off."""

from .analytic import (cluster_power, cluster_sizes, energy_efficiency, laplace_JI, laplace_JS,
                       mean_cluster_size, spatial_average_rate)
from .model import FadingModel, NetworkConfig, ThresholdVector, TierParams, mean_radius, reference_network, \
    threshold_from_radius
from .numerics import ConvergenceError, DomainError
from .optimizer import InfeasibleError, optimal_thresholds, threshold_exact, threshold_lower_bound

__version__ = "0.1.0"
