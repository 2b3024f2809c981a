"""Coherent-state (TDVP) dynamics of a single ion in a combined Paul-Penning trap.

Modules
-------
su11       discrete-series algebra, coherent-state moments, Fock-space oracle
disk       disk coordinates, Poisson bracket, Hamiltonian flow
trap       trap parameters, drive, spring constants, Mathieu parameters
husimi     polynomial energy function, gradients, equilibria
dynamics   trajectories, monodromy, stability scans, quasienergies
oracle     truncated-matrix evaluation of the same quantities
"""
from .disk import CoherentProductState, DiskPoint, ModeState
from .dynamics import (
    StabilityRecord,
    Trajectory,
    integrate,
    linearized_monodromy,
    quasienergy_spectrum,
    stability_scan,
)
from .errors import (
    BoundaryError,
    ConfigError,
    ConsistencyError,
    DomainError,
    IonTDVPError,
    StiffnessError,
    TruncationError,
    UnstableModeError,
)
from .husimi import HusimiCoefficients, assemble, evaluate, find_equilibria, gradient
from .su11 import BargmannWeight, TruncatedRep
from .trap import TrapConfig, mathieu_parameters, with_mathieu

__version__ = "0.1.0"
