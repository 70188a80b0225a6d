"""Sequential information-set decoding of convolutional codes."""

from .algebra import GF, get_field
from .convcode import ConvCode, PolyVector, SlidingBlockCode, encode, sliding_block
from .errors import ConvIsdError
from .isd import IsdConfig, SolutionList, augment_low_weight, brute_force_decode, prange_collect
from .polymat import PolyMatrix
from .seqdecode import AttackParams, AttackResult, attack, estimate_work, recover_message, verify

__version__ = "0.1.0"

__all__ = [
    "GF",
    "get_field",
    "ConvCode",
    "PolyVector",
    "SlidingBlockCode",
    "encode",
    "sliding_block",
    "ConvIsdError",
    "IsdConfig",
    "SolutionList",
    "augment_low_weight",
    "brute_force_decode",
    "prange_collect",
    "PolyMatrix",
    "AttackParams",
    "AttackResult",
    "attack",
    "estimate_work",
    "recover_message",
    "verify",
]
