"""Tsetlin Machine training with exclusion-based compression and
include-only inference.

The pipeline: booleanize raw data into literal matrices, train a dense
clause bank (optionally interleaving exclusion sweeps that force out
literals included in both polarities of a class), compress the bank to an
include-only model, and run or score inference over it.
"""

from .booleanize import (BinningSpec, ONE_HOT, THERMOMETER, booleanize,
                         booleanize_grayscale, fit_quantile_bins,
                         read_binning_spec, write_binning_spec)
from .data import (LiteralMatrix, RawDataset, append_complements, load_csv,
                   load_idx, load_idx_images, load_idx_labels, read_lit,
                   write_lit)
from .ethereal import (ExclusionSchedule, PHASE_EXCLUDE, PHASE_TRAIN,
                       TraceRecord, TrainingTrace, ethereal_train,
                       exclude_shared, read_trace_csv, shared_literals,
                       vanilla_train, write_trace_csv)
from .evaluate import (accuracy, include_heatmap, predictions, tradeoff_trace,
                       write_heatmap_csv, write_tradeoff_csv)
from .sparse import (BadMagicError, BadVersionError, HeaderFieldError,
                     IndexOrderError, IndexRangeError, ModelFormatError,
                     SparseModel, TrailingDataError, TruncatedPayloadError,
                     compress, deserialize, model_metrics, read_model,
                     serialize, sparse_infer, sparse_predict_batch,
                     write_model)
from .tm import (ClauseBank, EpochStats, Hyperparams, Prediction,
                 apply_type_i, apply_type_ii, class_sum, clause_output,
                 feedback_probability, init_bank, polarities, predict,
                 predict_batch, read_bank, train_datapoint, train_epoch,
                 write_bank)

__version__ = "0.1.0"
