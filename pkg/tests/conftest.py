import numpy as np
import pytest

from fluidrec.dataset import (
    apply_scaler,
    default_cohort_spec,
    fit_scaler,
    generate_synthetic,
    stratified_split,
)
from fluidrec.ife import IfeConfig, train_ife
from fluidrec.models import ClassifierConfig, train_classifier

COHORT_N = 3000
COHORT_SEED = 7


@pytest.fixture(scope="session")
def demo_spec():
    return default_cohort_spec()


@pytest.fixture(scope="session")
def cohort(demo_spec):
    return generate_synthetic(demo_spec, COHORT_N, seed=COHORT_SEED)


@pytest.fixture(scope="session")
def splits(cohort):
    train, val, test = stratified_split(cohort, (0.8, 0.1, 0.1), seed=0)
    scaler = fit_scaler(train)
    return (
        apply_scaler(train, scaler),
        apply_scaler(val, scaler),
        apply_scaler(test, scaler),
        scaler,
    )


@pytest.fixture(scope="session")
def classifier(splits):
    train_s, _, _, _ = splits
    return train_classifier(train_s, ClassifierConfig("feedforward", 3, 250, 0.01, seed=0))


@pytest.fixture(scope="session")
def ife_model(splits):
    train_s, _, _, _ = splits
    return train_ife(train_s, IfeConfig("feedforward", 10, 1000, 0.01, seed=0))


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
