import numpy as np
import pytest

from batchband.dataset import ColumnStats, LabeledTable

from _datasets import materialize


def make_table(features, labels, names=None) -> LabeledTable:
    """Hand-built already-normalized table for unit tests."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    y = np.asarray(labels, dtype=np.int64)
    k = int(y.max()) + 1 if y.size else 0
    if names is None:
        names = tuple(chr(ord("A") + i) for i in range(k))
    stats = tuple(ColumnStats(0.0, 1.0) for _ in range(X.shape[1]))
    encoders = tuple(None for _ in range(X.shape[1]))
    return LabeledTable(X, y, tuple(names), stats, encoders)


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("datasets")


@pytest.fixture(scope="session")
def dataset_paths(dataset_dir):
    """name -> (train path, test path or None) for whatever is obtainable."""
    def get(name):
        return materialize(name, dataset_dir)

    return get


@pytest.fixture(scope="session")
def iris_table(dataset_paths):
    from batchband.dataset import IngestOptions, load_table

    paths = dataset_paths("iris")
    if paths is None:
        pytest.skip("iris dataset unavailable (scikit-learn not installed)")
    return load_table(paths[0], IngestOptions(label_column=-1))


@pytest.fixture(scope="session")
def wine_table(dataset_paths):
    from batchband.dataset import IngestOptions, load_table

    paths = dataset_paths("wine")
    if paths is None:
        pytest.skip("wine dataset unavailable (scikit-learn not installed)")
    return load_table(paths[0], IngestOptions(label_column=-1))
