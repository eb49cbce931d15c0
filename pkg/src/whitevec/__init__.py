"""whitevec: whitening post-processing for dense embeddings, semantic
similarity evaluation, and brute-force retrieval benchmarking."""

from .errors import (
    BadMagic,
    DegenerateInput,
    DimensionMismatch,
    EmptyInput,
    NoConvergence,
    NonFinite,
    ParseError,
    RankDeficient,
    SchemaMismatch,
    TruncatedPayload,
    UnsupportedVersion,
    WhitevecError,
    ZeroVector,
)
from .evaluation import (
    EvalReport,
    PairedDataset,
    cosine_similarity,
    evaluate,
    spearman,
    sweep_k,
)
from .fileio import (
    load_transform,
    read_emb1,
    read_gold,
    save_transform,
    write_emb1,
)
from .linalg import EigenDecomposition, inv_sqrt_diag, sym_eig
from .retrieval import BenchReport, CosineIndex, benchmark, build_index, top_k
from .streaming import MomentState, finalize, merge
from .whitening import (
    WhiteningTransform,
    apply,
    apply_batch,
    compute_covariance,
    compute_mean,
    fit,
    truncate,
)

__version__ = "0.1.0"
