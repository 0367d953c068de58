import numpy as np
import pytest

from scma_ntn import build_mother_constellation, dimension_energy
from scma_ntn.constellation import pam_amplitudes


def brute_force_energy(m_order, delta):
    amps = pam_amplitudes(m_order, delta)
    return 2.0 * float(np.sum(amps**2))


def test_degenerate_delta_one_rows():
    mc = build_mother_constellation(4, 2, 1.0)
    assert np.array_equal(mc.rows[0], [-1, -1, 1, 1])
    assert np.array_equal(mc.rows[1], [-1, 1, -1, 1])


def test_delta_two_rows_match_published_pattern():
    mc = build_mother_constellation(4, 2, 2.0)
    assert np.array_equal(mc.rows[0], [-2, -1, 1, 2])
    assert np.array_equal(mc.rows[1], [-1, 2, -2, 1])


def test_eight_point_row():
    # a_m = 0.5*(m+1) for delta = 1.5
    mc = build_mother_constellation(8, 1, 1.5)
    assert np.allclose(mc.rows[0], [-2.5, -2, -1.5, -1, 1, 1.5, 2, 2.5])


def test_rows_alternate_and_repeat():
    mc = build_mother_constellation(4, 4, 2.0)
    assert np.array_equal(mc.rows[0], mc.rows[2])
    assert np.array_equal(mc.rows[1], mc.rows[3])


@pytest.mark.parametrize("m_order,delta,expected", [(4, 1.0, 4.0), (4, 2.0, 10.0), (8, 1.5, 27.0)])
def test_energy_examples(m_order, delta, expected):
    assert dimension_energy(m_order, delta) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("m_order", [4, 8, 16])
@pytest.mark.parametrize("delta", [1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0])
def test_energy_matches_brute_force(m_order, delta):
    closed = dimension_energy(m_order, delta)
    brute = brute_force_energy(m_order, delta)
    assert abs(closed - brute) <= 1e-12 * brute


@pytest.mark.parametrize("delta", [1.0, 1.7, 3.2])
@pytest.mark.parametrize("m_order", [4, 8, 16])
def test_row_invariants(m_order, delta):
    mc = build_mother_constellation(m_order, 3, delta)
    energies = np.sum(mc.rows**2, axis=1)
    assert np.allclose(mc.rows.sum(axis=1), 0.0, atol=1e-12)
    assert np.allclose(energies, energies[0], rtol=1e-14)
    # every row is a signed permutation of the same amplitude multiset
    ref = np.sort(np.abs(mc.rows[0]))
    for row in mc.rows:
        assert np.allclose(np.sort(np.abs(row)), ref)
    # odd (1-based) rows sorted ascending
    assert np.all(np.diff(mc.rows[0]) >= 0)


def test_amplitudes_strictly_increasing_for_delta_above_one():
    amps = pam_amplitudes(16, 1.3)
    assert np.all(np.diff(amps) > 0)
    assert amps[0] == pytest.approx(1.0)


@pytest.mark.parametrize("bad_call", [
    lambda: build_mother_constellation(3, 2, 1.5),
    lambda: build_mother_constellation(4, 2, 0.9),
    lambda: build_mother_constellation(4, 0, 1.5),
    lambda: dimension_energy(5, 2.0),
    lambda: dimension_energy(4, 0.5),
])
def test_input_validation(bad_call):
    with pytest.raises(ValueError):
        bad_call()
