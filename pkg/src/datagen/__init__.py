"""
Supervised datasets of first-stage points, scenario subsets and mean recourse labels.
"""

from .dataset import DataRecord, SurrogateDataset
from .generator import DatasetGenerator, generate_dataset, relabel

__all__ = ["DataRecord", "SurrogateDataset", "DatasetGenerator", "generate_dataset", "relabel"]
