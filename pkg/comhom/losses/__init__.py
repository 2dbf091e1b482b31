"""Майнінг трійок, банк центроїдів та повна цільова функція попереднього навчання."""

from .centroids import REAL, SYNTHETIC, CentroidBank, update_centroids
from .objective import (
    FeatureBatch, LossBreakdown, LossToggles, TripletTerms, heads_cross_entropy, total_loss, triplet_terms,
)
from .triplets import (
    BASIC, CENTROIDS, HARD, TripletConfig, TripletLoss, TripletSet, mine_triplets, squared_distances,
    triplet_loss,
)
