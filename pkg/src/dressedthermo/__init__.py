"""Heat exchange between a pulse-driven two-level emitter and a phonon bath.

Dressed-state master equation, counting statistics of the absorbed heat,
engine efficiency, effective temperature, continuous-wave laser cooling and a
quantum-jump Monte Carlo cross-check.
"""

from .bath import EXCITON_J, SIV_J, BathSpec, SpectralDensity, phonon_rates, rates_from
from .core import (DressedFrame, DriveFrame, dressed_frame, effective_temperature,
                   kelvin_to_angular_rate, von_neumann_entropy)
from .fcs import (CountingGrid, HeatDistribution, characteristic_scan, default_grid,
                  heat_distribution, heat_pipeline, mean_from_derivative, moments)
from .propagator import EvolutionSpec, TrajectoryRecord, evolve, evolve_counting
from .pulse import ChirpedGaussianSpec, chirp_transform, pulse_table, synthesize_spectrally
from .steady import (AbsorptionModel, CWDriveSpec, absorption_heating, cooling_power,
                     net_cooling_map, steady_state)
from .thermo import (EngineSpec, NotHeatAbsorbingError, engine_efficiency, entropy_production,
                     find_plateau, integrated_heat, ts_trajectory)
from .unravel import JumpTrajectoryStats, sample_trajectories, total_variation

__version__ = "0.1.0"
