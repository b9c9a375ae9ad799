from .config import PUBLISHED, StreamConfig, geometric_grid
from .coreset import StreamingCoreset, WeightedSet, sensitivity_reduce, weighted_cost
from .faraway import FarawaySampler
from .one_median import StreamingOneMedian, streaming_1_median
from .sketch import (SampleBucket, StreamQueryResult, StreamSketch, sketch_init,
                     sketch_query, sketch_update)

__all__ = [
    "PUBLISHED", "StreamConfig", "geometric_grid", "StreamingCoreset", "WeightedSet",
    "sensitivity_reduce", "weighted_cost", "FarawaySampler", "StreamingOneMedian",
    "streaming_1_median", "SampleBucket", "StreamQueryResult", "StreamSketch",
    "sketch_init", "sketch_query", "sketch_update",
]
