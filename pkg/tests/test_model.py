import numpy as np
import pytest

from qesf.errors import ModelError
from qesf.model import (EXACTLY_SOLVABLE, QES_SINGULAR, QES_TYPE1, QES_TYPE2,
                        ModelSpec, Singularity, classify, spec_seed, validate)
from qesf.poly import Poly


def harmonic(b=1.0, N=2):
    return ModelSpec(Poly([1.0]), Poly([0.0, b]), (), N)


def sextic(a=1.0, b=0.0, N=1):
    return ModelSpec(Poly([0.0, 4.0]), Poly([0.0, 2 * b, 2 * a]), (), N)


def test_classify_examples():
    assert classify(harmonic()).tag == EXACTLY_SOLVABLE
    assert classify(sextic()).tag == QES_TYPE1
    type2 = ModelSpec(Poly([1.0]), Poly([0.0, 1.0, 0.0, 1.0]), (), 1)
    assert classify(type2).tag == QES_TYPE2
    class8 = ModelSpec(Poly([1.0]), Poly([0.5, 1.0]),
                       (Singularity(0.0, 0.3),), 1)
    assert classify(class8).tag == QES_SINGULAR


def test_no_promotion_when_Q_vanishes_at_singularity():
    # radial-oscillator pattern: Q linear with a zero at the singularity
    spec = ModelSpec(Poly([0.0, 1.0]), Poly([0.0, 1.0]),
                     (Singularity(0.0, 1.5),), 2)
    assert classify(spec).tag == EXACTLY_SOLVABLE


def test_classify_rejects_invalid():
    with pytest.raises(ModelError):
        classify(ModelSpec(Poly([0.0]), Poly([0.0, 1.0]), (), 1))
    with pytest.raises(ModelError):
        classify(ModelSpec(Poly([1.0]), Poly([0, 0, 0, 0, 1.0]), (), 1))


def test_classify_scale_invariance():
    rng = np.random.default_rng(5)
    specs = [harmonic(), sextic(),
             ModelSpec(Poly([1.0]), Poly([0.0, 1.0, 0.0, 1.0]), (), 1),
             ModelSpec(Poly([1.0]), Poly([0.5, 1.0]), (Singularity(0.0, 0.3),), 1)]
    for spec in specs:
        base = classify(spec).tag
        for _ in range(10):
            lam = 10.0 ** rng.uniform(-3, 3)
            scaled = ModelSpec(spec.Q, lam * spec.P, spec.singularities, spec.N)
            assert classify(scaled).tag == base


def test_validate_advisories():
    assert any("square-integrable" in d.message
               for d in validate(harmonic(b=-1.0)) if d.level == "warning")
    assert validate(sextic(a=1.0)) == []
    dup = ModelSpec(Poly([1.0]), Poly([0.0, 1.0]),
                    (Singularity(0.5, 0.1), Singularity(0.5, 0.2)), 1)
    assert any(d.level == "error" for d in validate(dup))


def test_validate_negative_mu_warning():
    spec = ModelSpec(Poly([0.0, 0.0, 1.0]), Poly([0.0, -5.0, 0.5]),
                     (Singularity(0.0, -1.0),), 2, -1)
    msgs = [d.message for d in validate(spec) if d.level == "warning"]
    assert any("negative singularity exponent" in m for m in msgs)
    # the documented mu = -N case stays silent
    ok = ModelSpec(Poly([0.0, 0.0, 1.0]), Poly([0.0, -5.0, 0.5]),
                   (Singularity(0.0, -2.0),), 2, -1)
    assert not any("negative singularity exponent" in d.message for d in validate(ok))


def test_spec_seed_deterministic_and_distinct():
    assert spec_seed(harmonic()) == spec_seed(harmonic())
    assert spec_seed(harmonic()) != spec_seed(harmonic(b=2.0))
    assert spec_seed(harmonic(N=2)) != spec_seed(harmonic(N=3))
