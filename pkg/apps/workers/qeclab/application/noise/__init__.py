from qeclab.application.noise.channels import (
    DiscreteErrorMap,
    LocalChannel,
    compose,
    deviation_from_identity,
    element_deviation,
    identity_map,
)
from qeclab.application.noise.replacement import (
    LindbladGenerator,
    ReplacementChannel,
    apply_phi,
    apply_phi_matrix,
    bit_flip_map,
    discrete_error_from_time,
    kraus_phi,
    mixed_replacement_channel,
    mixing_weight,
    register_error_map,
)

__all__ = [
    "DiscreteErrorMap",
    "LindbladGenerator",
    "LocalChannel",
    "ReplacementChannel",
    "apply_phi",
    "apply_phi_matrix",
    "bit_flip_map",
    "compose",
    "deviation_from_identity",
    "discrete_error_from_time",
    "element_deviation",
    "identity_map",
    "kraus_phi",
    "mixed_replacement_channel",
    "mixing_weight",
    "register_error_map",
]
