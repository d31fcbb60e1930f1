"""Angular-margin softmax losses on the hypersphere.

A small numpy library covering the fixed-margin loss family (softmax,
multiplicative/additive-angle/additive-cosine margins), the split-margin
reformulation, and dynamic per-class margins driven by the ratio of the
sample-to-center angle to the inter-class angle -- plus the machinery to
certify the gradients, train toy sphere-embedding models, and reproduce
the board-count parameter-selection protocol.
"""

from .errors import (
    BadGrid,
    ConfigInvalid,
    DegenerateCenter,
    DimensionMismatch,
    EmptyGallery,
    EmptyScores,
    FarOutOfRange,
    InsufficientSamples,
    LengthMismatch,
    MalformedTable,
    MissingLabel,
    NonFiniteLoss,
    NonFiniteObjective,
    NotToyShape,
    ShapeMismatch,
    SphereMarginError,
    SplitMismatch,
    StepOutOfRange,
    ZeroVector,
)
from .geometry import (
    COS_CLAMP,
    ClassWeights,
    EmbeddingBatch,
    angles,
    clamp_cosines,
    cosine_matrix,
    inter_class_angles,
    normalize,
    normalize_rows,
)
from .losses import (
    GRADIENT_MODES,
    VARIANTS,
    LossResult,
    MarginConfig,
    aml_logits,
    aml_target_logit,
    cross_entropy,
    interface_logits,
    loss_and_grad,
    loss_value,
    margin_f,
    margins_at,
    rarc_logits,
    sir_gamma,
    threshold_t,
)
from .gradcheck import GradReport, compare, finite_diff, run_suite
from .data import (
    PairSet,
    SphereMixtureSpec,
    class_centers,
    generate,
    load_batch_csv,
    load_pairs_csv,
    make_pairs,
    save_batch_csv,
    save_pairs_csv,
)
from .metrics import (
    AccuracyTable,
    BoardCount,
    ScoredPairs,
    accuracy_at,
    board_count,
    kfold_accuracy,
    pair_accuracy,
    rank1,
    read_accuracy_csv,
    scored_pairs,
    tar_at_far,
    write_accuracy_csv,
    write_board_count,
)
from .training import (
    OptimizerState,
    Schedule,
    ToyModel,
    TrainResult,
    init_optimizer,
    lr_at,
    make_schedule,
    make_toy_model,
    sgd_step,
    toy_summary,
    train,
)
from .config import RunConfig, build_margin_config, load_config, resolved_config_text

__version__ = "0.1.0"
