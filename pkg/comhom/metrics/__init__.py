from .accuracy import (
    SUBSETS, ConfusionMatrix, accuracy_summary, as_class_indices, balanced_accuracy, confusion_matrix,
    per_class_recall,
)
from .similarity import DELTA, SimilarityMatrix, SimilaritySummary, rbf_similarity, set_sim, similarity_matrix
