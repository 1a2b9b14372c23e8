"""qtclab: quantum machine learning on a noisy Floquet time-crystal substrate.

Statevector simulation of a periodically driven spin register whose Ising
half-periods carry controlled Gaussian coefficient noise, used as the
compute substrate for three learning pipelines: reservoir computing with a
pseudoinverse readout, a layered quantum neural network, and a variational
Kolmogorov-Arnold network, all trained derivative-free with CMA-ES.
"""

from . import _kernels
from .cmaes import CmaState, OptimizeResult, ask, cma_init, optimize, tell
from .config import ConfigError, ExperimentConfig, derive_rng, derive_seed, parse_config
from .core import (
    IsingHamiltonian,
    PauliString,
    Statevector,
    apply_cry,
    apply_ry,
    evolve,
    expectation,
    to_matrix,
    zero_state,
)
from .floquet import FloquetSchedule, NoiseSpec, drive_hamiltonian, floquet_propagate, sample_noisy_h1
from .harness import RunReport, emit_report, run_case
from .qml import (
    EncodedInput,
    ModelSpec,
    fermi_dirac,
    feature_readout,
    model_forward,
    parabolic_encode,
    target_function,
    test_metric,
    training_loss,
    vqkan_angle,
)
from .qrc import (
    DegenerateRankError,
    ReservoirDataset,
    WaveformSpec,
    fit_filter,
    generate_waveform,
    harvest_features,
    input_operator,
    predict,
    qrc_loss,
    run_echo_suite,
)
from .splines import BSplineBasis

__version__ = "0.1.0"

kernel_backend = _kernels.backend_name
