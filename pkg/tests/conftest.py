from pathlib import Path

import numpy as np
import pytest

from bayeval.confusion import ConfusionMatrix

LABELS = ("Normal", "Pneumonia", "Covid-19")

# External-test-set confusion matrices of the two reference classifiers
# (with and without lung segmentation); shipped as fixtures/ too.
SEGMENTED_COUNTS = [[38, 7, 5], [8, 32, 10], [2, 0, 48]]
UNSEGMENTED_COUNTS = [[43, 0, 7], [14, 24, 12], [6, 0, 44]]


@pytest.fixture
def segmented_cm():
    return ConfusionMatrix(LABELS, np.array(SEGMENTED_COUNTS))


@pytest.fixture
def unsegmented_cm():
    return ConfusionMatrix(LABELS, np.array(UNSEGMENTED_COUNTS))


@pytest.fixture(scope="session")
def fixtures_dir():
    return Path(__file__).resolve().parent.parent / "fixtures"
