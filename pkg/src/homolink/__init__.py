"""Link prediction by weighted fusion of structural and homophily similarity."""

from .aggregate import (COMPUTED, UNIFORM, PairScorer, ScorerConfig, resolve_weights,
                        score_pair, score_pair_uniform)
from .attributes import (MISSING, AttributeTable, ImputationPolicy, ImputationReport, delta,
                         impute, tune_thresholds)
from .errors import (DegenerateError, DegenerateNullModelError, DegenerateScorerError,
                     HomolinkError, InputError, NoViablePolicyError, UnweightableAttributeError)
from .evaluation import EvaluationReport, HoldoutSplit, auc_trial, evaluate, holdout
from .graph import (Graph, bfs_sample, build_graph, common_neighbors, local_clustering,
                    local_clustering_all, triangles_per_node)
from .homophily import HomophilyMetricKind, homophily_score
from .structural import StructuralMetricKind, structural_score
from .weights import (StructuralEstimator, WeightSet, compute_weights, global_clustering,
                      homophily_weight, motif_z, structural_weight_avg_cc)

__version__ = "0.1.0"
