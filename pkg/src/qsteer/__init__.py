"""EPR steering, entanglement and discord of two-qubit states under noise and swapping."""

__version__ = "0.1.0"

from .channels import (
    KrausChannel,
    almeida_after_gad,
    almeida_after_pd,
    almeida_after_sdc,
    apply_channel,
    gad_channel,
    identity_channel,
    lift_two_qubit,
    pd_channel,
    sdc_channel,
    time_to_p,
    two_qubit_channel,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    InvalidStateError,
    NonHermitianError,
    NotTracePreservingError,
    NotXFormError,
    QsteerError,
    ZeroProbabilityOutcome,
)
from .quantifiers import (
    concurrence,
    concurrence_xform,
    correlation_matrix,
    f3_steering,
    f3_xform,
    interferometric_power,
    ip_bruteforce,
    negativity,
    qfi,
    quantify,
)
from .states import (
    AlmeidaParams,
    BellIndex,
    DensityOperator,
    XFormState,
    lhs_admissible,
    make_almeida,
    make_bell,
    partial_trace,
    tensor,
    to_xform,
)
from .swapping import SwapOutcome, swap, swap_all
from .sweeps import (
    SweepConfig,
    SweepResult,
    detect_revival,
    detect_sudden_death,
    figure_data,
    run_sweep,
)
