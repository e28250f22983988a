import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.model_selection import ParameterGrid
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from engagement_lab.core import ModelPoint, expected_engagement, expected_utility
from engagement_lab.estimators import DualSystemModel, ManifoldOptimizer, PopulationTransformer
from engagement_lab.exceptions import ValidationError

X = np.array([[0.0, 0.5, 3.0], [0.5, 0.5, 3.0], [0.9, 0.5, 3.0], [0.8, 0.5, 3.0]])


def test_dual_system_transform_and_predict():
    model = DualSystemModel(w=1.0).fit(X)
    out = model.transform(X)
    for row, (s, t) in zip(X, out):
        pt = ModelPoint.of(*row, 1.0)
        assert s == pytest.approx(expected_utility(pt)) and t == pytest.approx(expected_engagement(pt))
    assert model.predict(X).tolist() == [True, True, False, True]
    assert list(model.get_feature_names_out()) == ["e_s", "e_t"]


def test_params_and_clone():
    model = DualSystemModel(w=2.0)
    assert model.get_params() == {"w": 2.0}
    twin = clone(model).set_params(w=0.5)
    assert twin.w == 0.5 and model.w == 2.0
    assert [clone(model).set_params(**g).w for g in ParameterGrid({"w": [0.5, 1.0]})] == [0.5, 1.0]


def test_input_validation():
    with pytest.raises(ValidationError):
        DualSystemModel().fit([[0.5, 0.5]])
    with pytest.raises(ValidationError):
        DualSystemModel().fit([[1.5, 0.5, 3.0]])
    with pytest.raises(ValidationError):
        DualSystemModel(w=-1).fit(X)
    with pytest.raises(NotFittedError):
        DualSystemModel().transform(X)
    # a single row is accepted as 1-D
    assert DualSystemModel().fit(X).transform([0.5, 0.5, 3.0]).shape == (1, 2)


def test_pipeline():
    pipe = make_pipeline(DualSystemModel(), StandardScaler())
    assert pipe.fit_transform(X).shape == (4, 2)


def test_manifold_optimizer():
    opt = ManifoldOptimizer(w=1.0).fit(X)
    assert opt.index_s_ == 0 and opt.index_t_ == 3
    assert opt.classification_ == "higher_moreishness"
    assert opt.predict(X).tolist() == [True, False, False, False]
    assert ManifoldOptimizer(objective="engagement").fit(X).predict(X).tolist() == [False, False, False, True]
    with pytest.raises(ValueError):
        ManifoldOptimizer(objective="revenue").fit(X)


def test_population_transformer():
    out = PopulationTransformer(0.5, 1.0).fit(X).transform([[0.5, 0.5, 1.35]])
    assert out[0].tolist() == pytest.approx([0.8, 3.0, 2.4, 0.48])
