"""Laboratory for two-message, two-database private information retrieval.

Implements a two-round non-linear retrieval scheme with split coded storage,
a single-round linear scheme, exact-rational privacy auditing, entropy and
binning coders, and closed-form capacity oracles.
"""

from .capacity import OverheadAccount, PirParameters, check_rate_admissible, mtpir_capacity, storage_overhead
from .coding import CodecConfig, SourceModel, SwBin, entropy_decode, entropy_encode, sw_decode, sw_encode
from .descriptor import SchemeDescriptor, SessionRecord
from .dist import ExactDist, conditional_entropy, entropy, marginal, mutual_information, total_variation
from .linear import LinearMessages, PatternChoice, StoredLinear, asymmetric_toy_descriptor, linear_descriptor, linear_retrieve, linear_store, replicated_descriptor, replicated_store, symmetrize
from .multiround import CellTable, MessagePair, Transcript, db2_answer, decode, derive_cells, multiround_descriptor, round1, round2_query, run_session
from .seeds import derive_seed

__all__ = [
    "CellTable",
    "CodecConfig",
    "ExactDist",
    "LinearMessages",
    "MessagePair",
    "OverheadAccount",
    "PatternChoice",
    "PirParameters",
    "SchemeDescriptor",
    "SessionRecord",
    "SourceModel",
    "StoredLinear",
    "SwBin",
    "Transcript",
    "asymmetric_toy_descriptor",
    "check_rate_admissible",
    "conditional_entropy",
    "db2_answer",
    "decode",
    "derive_cells",
    "derive_seed",
    "entropy",
    "entropy_decode",
    "entropy_encode",
    "linear_descriptor",
    "linear_retrieve",
    "linear_store",
    "marginal",
    "mtpir_capacity",
    "multiround_descriptor",
    "mutual_information",
    "replicated_descriptor",
    "replicated_store",
    "round1",
    "round2_query",
    "run_session",
    "storage_overhead",
    "sw_decode",
    "sw_encode",
    "symmetrize",
    "total_variation",
]
