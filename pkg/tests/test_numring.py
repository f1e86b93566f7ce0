from fractions import Fraction

import pytest

from zcrit.numring import (
    NumericalRing,
    RingError,
    RingMismatchError,
    SeriesDomainError,
    integrate,
    power_series_apply,
    preset_ring,
    ring_from_dict,
    ring_to_dict,
)

F = Fraction


def two_factor_ring():
    """Degree-3 ring with generators a (a^2 = 0) and b (b^3 = 0),
    int a b^2 = 1. Mixed products follow from commutativity."""
    return ring_from_dict({
        "name": "two_factor",
        "complex_dimension": 3,
        "generators": [
            {"name": "1", "degree": 0},
            {"name": "a", "degree": 2},
            {"name": "b", "degree": 2},
            {"name": "ab", "degree": 4},
            {"name": "b^2", "degree": 4},
            {"name": "ab^2", "degree": 6},
        ],
        "products": [
            ["a", "b", {"ab": "1"}],
            ["b", "b", {"b^2": "1"}],
            ["a", "b^2", {"ab^2": "1"}],
            ["b", "ab", {"ab^2": "1"}],
        ],
        "integration": {"ab^2": "1"},
    })


def test_projective_plane_products_and_integration():
    ring = preset_ring("projective_space", n=2)
    h = ring.gen("h")
    assert (h * h).coefficient("h^2") == 1
    assert (h * h * h).is_zero()
    assert integrate(h * h) == 1
    assert integrate(h) == 0
    assert ring.basis_names() == ["1", "h", "h^2"]
    ring.check_multiplicative_laws()


def test_stored_todd_class():
    ring = preset_ring("projective_space", n=2)
    h = ring.gen("h")
    assert ring.todd == ring.unit() + h.scale(F(3, 2)) + (h * h)
    # Euler characteristic of the structure sheaf through the index formula
    assert integrate(ring.todd) == 1


def test_series_exp_inverse_sqrt():
    ring = preset_ring("projective_space", n=2)
    h = ring.gen("h")
    assert power_series_apply("exp", h) == ring.unit() + h + (h * h).scale(F(1, 2))
    assert power_series_apply("exp", ring.zero()) == ring.unit()

    inv = power_series_apply("inverse", ring.unit() + h)
    assert inv == ring.unit() - h + (h * h)
    assert inv * (ring.unit() + h) == ring.unit()

    s = power_series_apply("sqrt", ring.todd)
    assert s == ring.unit() + h.scale(F(3, 4)) + (h * h).scale(F(7, 32))
    assert s * s == ring.todd


def test_series_domain_requirements():
    ring = preset_ring("projective_space", n=2)
    h = ring.gen("h")
    with pytest.raises(SeriesDomainError):
        power_series_apply("sqrt", h)            # constant term 0
    with pytest.raises(SeriesDomainError):
        power_series_apply("inverse", h.scale(F(2)))
    with pytest.raises(SeriesDomainError):
        power_series_apply("sqrt", ring.unit().scale(F(-1)) + h)
    with pytest.raises(RingError):
        power_series_apply("cosh", ring.unit())


def test_exp_turns_sums_into_products():
    ring = two_factor_ring()
    a, b = ring.gen("a"), ring.gen("b")
    lhs = power_series_apply("exp", a + b)
    rhs = power_series_apply("exp", a) * power_series_apply("exp", b)
    assert lhs == rhs


def test_two_factor_relations():
    ring = two_factor_ring()
    a, b = ring.gen("a"), ring.gen("b")
    assert (a * a).is_zero()
    assert (b * b * b).is_zero()
    assert integrate(a * b * b) == 1
    assert integrate(b * b) == 0
    om = a + b
    assert integrate(om * om * om) == 3       # 3 a b^2 survives
    ring.check_multiplicative_laws()


def test_torus_line_preset_volume():
    ring = preset_ring("torus_line", vol=F(5, 2))
    w = ring.gen("w")
    assert integrate(w * w) == F(5, 2)
    assert ring.todd == ring.unit()
    with pytest.raises(RingError):
        preset_ring("torus_line", vol=F(-1))


def test_unknown_preset_and_generator():
    with pytest.raises(RingError):
        preset_ring("flag_variety")
    ring = preset_ring("projective_space", n=2)
    with pytest.raises(RingError):
        ring.gen("x")


def test_cross_ring_arithmetic_rejected():
    r1 = preset_ring("projective_space", n=2)
    r2 = preset_ring("projective_space", n=3)
    with pytest.raises(RingMismatchError):
        r1.gen("h") + r2.gen("h")
    with pytest.raises(RingMismatchError):
        r1.gen("h") * r2.gen("h")


def test_component_and_degree_queries():
    ring = preset_ring("projective_space", n=2)
    h = ring.gen("h")
    cls = ring.unit().scale(F(3)) + h.scale(F(-1, 2)) + (h * h).scale(F(7))
    assert cls.degree0() == 3
    assert cls.component(2) == h.scale(F(-1, 2))
    assert cls.degrees() == [0, 2, 4]
    assert cls.coefficient("h^2") == 7


def test_dict_round_trip():
    ring = two_factor_ring()
    rebuilt = ring_from_dict(ring_to_dict(ring))
    assert rebuilt.basis_names() == ring.basis_names()
    a, b = rebuilt.gen("a"), rebuilt.gen("b")
    assert integrate(a * b * b) == 1
    with pytest.raises(RingError):
        ring_from_dict({"generators": []})
