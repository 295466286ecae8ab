"""Greedy shift-reduce discourse parser."""

from .features import FeatureConfig, extract_features
from .model import Model, TrainConfig, load_model, parse, parse_tree, save_model, stratified_dev, train, warm_start
from .stacking import (
    WindowLabelTagger,
    distance_bucket,
    stack_features_from_parser,
    stack_features_from_tagger,
    window_label_tagger,
)
from .transitions import SHIFT, ParserState, Reduce, Transition, oracle, replay

__all__ = [
    "FeatureConfig", "extract_features", "Model", "TrainConfig", "load_model", "parse", "parse_tree",
    "save_model", "stratified_dev", "train", "warm_start", "WindowLabelTagger", "distance_bucket",
    "stack_features_from_parser", "stack_features_from_tagger", "window_label_tagger",
    "SHIFT", "ParserState", "Reduce", "Transition", "oracle", "replay",
]
