"""Numerical workbench for majorization relations between the outputs of a
two-mode squeezer fed with Fock-basis states."""

__version__ = "0.1.0"

from .channel import (
    ChannelDecomposition,
    ChannelParams,
    GaussianMoments,
    apply_amp,
    apply_channel,
    apply_loss,
    decompose,
    density_entropy,
    gaussian_output_entropy,
    loss_kraus,
    moment_map,
    thermal_entropy,
)
from .errors import (
    DegenerateState,
    FockMajError,
    InconclusiveTruncation,
    InvalidDistribution,
    InvalidParameter,
    InvalidState,
    NotCompletelyPositive,
    PreconditionViolated,
    ProtocolInconsistent,
    TruncationError,
)
from .explore import (
    ScanConfig,
    SearchResult,
    crossing_finder,
    fock_scan,
    minimize_entropy,
    random_majorization_scan,
)
from .fock import (
    BipartiteAmplitudeMatrix,
    DensityMatrix,
    FockState,
    ProbabilityVector,
    entropy,
    entropy_tail_bound,
    normalize,
    schmidt_spectrum,
    state_moments,
)
from .locc import ProtocolTrace, bs_attenuate, povm_reduce
from .majorization import (
    TransferMatrix,
    TransferReport,
    build_D,
    build_R,
    incomplete_beta,
    majorizes,
    verify_transfer,
)
from .squeezer import (
    SqueezeParam,
    infinitesimal_approx,
    output_entanglement,
    output_spectrum,
    output_state,
    schmidt_vector,
    tmsv_entropy,
)
