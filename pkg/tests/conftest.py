import pytest

from odsmooth import standardize, synth_clusters_with_outliers


@pytest.fixture(scope="session")
def clustered_dataset():
    """The seeded clusters-plus-noise benchmark fixture, standardized."""
    return standardize(synth_clusters_with_outliers(1000, 50, 2, 1.0, 7))
