from fractions import Fraction

from hypothesis import given, seed, settings, strategies as st

from holderlab.bounds import eval_h, invert_h
from holderlab.cross.phi import cross_phi_of_fraction
from holderlab.geometry import Dyadic
from holderlab.levelset.complex import TriangleComplex
from holderlab.levelset.engine import random_cover_audit
from holderlab.phi.admissible import AdmissibleSet
from holderlab.phi.witness import Witness

ABS_TOLERANCE = 1e-12
MAX_DENOMINATOR = 2000

unit_fractions = st.fractions(min_value=0, max_value=1, max_denominator=MAX_DENOMINATOR)


@seed(1)
@settings(max_examples=200, deadline=None)
@given(x=unit_fractions, y=unit_fractions, m=st.integers(min_value=2, max_value=4))
def test_cross_phi_is_monotone(x, y, m):
    lo, hi = sorted((x, y))
    a = cross_phi_of_fraction(m, lo)
    b = cross_phi_of_fraction(m, hi)
    assert 0 <= a <= b <= 1


@seed(2)
@settings(deadline=None)
@given(
    alpha=st.floats(min_value=1e-3, max_value=0.999),
    kind=st.sampled_from(["lower_hausdorff", "lower_box", "upper_witness"]),
)
def test_inversion_residual(alpha, kind):
    t = invert_h(kind, alpha)
    assert abs(float(eval_h(kind, t)) - alpha) <= ABS_TOLERANCE


@seed(3)
@given(
    a=st.integers(min_value=-(2**40), max_value=2**40),
    e=st.integers(min_value=0, max_value=60),
    b=st.integers(min_value=-(2**40), max_value=2**40),
    f=st.integers(min_value=0, max_value=60),
)
def test_dyadic_arithmetic_matches_fractions(a, e, b, f):
    x, y = Dyadic(a, e), Dyadic(b, f)
    fx, fy = Fraction(a, 2**e), Fraction(b, 2**f)
    assert (x + y).to_fraction() == fx + fy
    assert (x - y).to_fraction() == fx - fy
    assert (x * y).to_fraction() == fx * fy
    assert x.compare(y) == (fx > fy) - (fx < fy)


@seed(4)
@settings(deadline=None)
@given(blocks=st.lists(st.sampled_from([0, 2, 3]), min_size=3, max_size=9))
def test_witness_values_stay_in_unit_interval(blocks):
    witness = Witness(AdmissibleSet(3, 1))
    value = witness.value(blocks)
    assert 0 <= value <= 1


@seed(5)
@settings(max_examples=25, deadline=None)
@given(run_seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_children_cover_root_under_random_values(run_seed):
    report = random_cover_audit(TriangleComplex(2), trials=50, seed=run_seed)
    assert report.passed
    assert report.checked == 50
