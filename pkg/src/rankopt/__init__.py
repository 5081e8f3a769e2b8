"""Linear scorers trained for ranking metrics (precision/recall targets,
AUCPR, AUCROC, F-beta) through hinge-bound surrogates and saddle-point SGD."""

from .bounds import (BoundValues, compute_bounds, hinge_loss, hinge_subgradient,
                     surrogate_precision, surrogate_recall)
from .core import (DataError, LabeledDataset, LabeledExample, MetricsReport, ObjectiveKind,
                   ObjectiveSpec, SaddleState, ThresholdedScorer, load_csv, save_csv, score)
from .data import SyntheticSpec, generate
from .fbeta_lp import build_lp, recover_scorer, solve_lp
from .metrics import (ScoredSet, auc_roc, average_precision, confusion_at, exact_fbeta,
                      exact_precision_at_recall, exact_recall_at_precision, metrics_report,
                      pr_curve)
from .objectives import (AnchorWeights, SaddleEvaluation, aucpr_lagrangian, aucroc_lagrangian,
                         c_weight, fbeta_psi_lagrangian, fbeta_surrogate, par_lagrangian,
                         precision_anchors, rap_constraint_residual, rap_lagrangian)
from .optimizer import TrainConfig, TrainTrace, averaged_iterate, sgd_step, train

__version__ = "0.1.0"
