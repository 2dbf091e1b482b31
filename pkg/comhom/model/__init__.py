"""Енкодер, оператори комбінування, голови попереднього навчання та бандл."""

from .bundle import TrainedBundle, all_parameters, build_model, load_bundle, save_bundle
from .combination import (
    AVG, MLP, AvgOperator, CombinationOperator, MlpOperator, SyntheticFeature, SyntheticSet, combine,
    combine_all_pairs, combine_pairs, combine_pairs_backward, make_operator, pair_indices,
)
from .encoder import FEATURE_DIM, Encoder, EncoderConfig, build_encoder_graph, encode
from .heads import LARGE, SMALL, PretrainHeads, classify_heads
