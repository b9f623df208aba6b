"""Early-warning pipeline predicting drug-batch recalls from search-query time series."""

from .model import ClusterBaggedClassifier

__all__ = ["ClusterBaggedClassifier"]
__version__ = "0.1.0"
