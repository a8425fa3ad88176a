"""Learning-augmented online interval scheduling with irrevocable decisions."""

from .core import (
    BinaryPrediction,
    ConflictGraph,
    FullPrediction,
    Instance,
    Interval,
    Schedule,
    conflict_graph,
    instance_from_pairs,
    load_instance,
    restrict,
    save_instance,
    validate_instance,
)
from .errors import (
    BadEpsilon,
    BadParameter,
    DuplicateId,
    EmptyTrace,
    IntschedError,
    MalformedLine,
    NonPositiveLength,
    NotAChain,
    NotTwoValue,
    PredictionMismatch,
    ProtocolViolation,
    TooLarge,
)
from .frameworks import (
    CLASSIC_ALGORITHMS,
    GREEDY,
    VIRTUAL,
    ClassicAlgorithm,
    evaluation_point,
    semi_trust_and_switch,
    should_switch,
    trust_and_switch,
)
from .offline import brute_force_opt, dp_opt
from .online import RunRecord, greedy, trust, virtual_algorithm, virtual_batch
from .predictions import corrupt_by_displacement, perfect_prediction, prediction_error
from .smooth_merge import (
    MergeParams,
    chain_probabilities,
    smooth_merge,
    smooth_merge_batch,
    theorem_bound,
)

__version__ = "0.1.0"
