import math

import numpy as np
import pytest
from collections import Counter

from entprop import qmat
from entprop.channels import prepare_resource
from entprop.entanglement import monogamy_delta
from entprop.protocol import (CapacityError, ProtocolSpec, enumerate_branches, initial_state, post_select,
                              protocol_delta, run_branch)
from entprop.states import AuxiliaryParams, bell_state


def test_labels_and_defaults():
    s = ProtocolSpec(scheme="bidirectional", n=2, m=1)
    assert s.labels == ("A", "A1", "B", "B1", "B2")
    assert len(s.aux_b) == 2 and len(s.aux_a) == 1
    assert s.default_outcomes() == (3, 3, 3)


def test_spec_validation():
    with pytest.raises(ValueError):
        ProtocolSpec(n=1, m=1)
    with pytest.raises(ValueError):
        ProtocolSpec(n=2, aux_b=(AuxiliaryParams(),))
    with pytest.raises(CapacityError):
        ProtocolSpec(n=5)


def test_initial_state_ordering():
    aux = AuxiliaryParams(math.pi, 0.0)  # |1>
    s = ProtocolSpec(scheme="bidirectional", n=1, m=1, aux_a=(aux,), z=0.0)
    rho = initial_state(s)
    # |0>_A |1>_A1 |0>_B |0>_B1 -> index 0b0100
    assert np.isclose(rho[4, 4], 1)


def test_trivial_measurement_branch():
    s = ProtocolSpec(n=1, lambda_b=0.0, z=0.4, placement="B", channel="adc", p=0.3)
    for o in (1, 2, 3, 4):
        br = run_branch(s, (o,))
        assert np.isclose(br.probability, 0.25)
        assert np.allclose(br.state, np.kron(prepare_resource(0.4, "B", "adc", 0.3), np.diag([1, 0])))


def test_projective_branch_decouples():
    s = ProtocolSpec(n=1, lambda_b=1.0, z=math.pi / 4)
    st = post_select(s)
    assert np.allclose(st, np.kron(np.diag([0, 1]), qmat.projector(bell_state(3))))
    assert np.isclose(np.trace(st @ st).real, 1.0)


def test_bidirectional_trivial_is_product():
    s = ProtocolSpec(scheme="bidirectional", n=1, m=1, lambda_b=0.0)
    br = enumerate_branches(s)
    assert len(br) == 16
    for b in br:
        assert np.isclose(b.probability, 1 / 16)
        assert np.allclose(b.state, initial_state(s))
        assert abs(monogamy_delta(b.state, "B", b.labels)) < 1e-10


def test_branch_probabilities_sum():
    s = ProtocolSpec(n=2, lambda_b=0.5, z=math.pi / 8, placement="B", channel="adc", p=0.2)
    br = enumerate_branches(s)
    assert len(br) == 16
    assert abs(sum(b.probability for b in br) - 1) < 1e-9
    assert [b.outcomes for b in br] == sorted(b.outcomes for b in br)
    for b in br:
        assert qmat.is_density_matrix(b.state)
    assert len(enumerate_branches(ProtocolSpec(n=1))) == 4


def test_enumeration_matches_run_branch():
    s = ProtocolSpec(scheme="bidirectional", n=1, m=1, lambda_b=0.6, lambda_a=0.3, z=0.5,
                     aux_b=(AuxiliaryParams(1.0, 2.0),), placement="AB", channel="dpc", p=0.2)
    for b in enumerate_branches(s):
        r = run_branch(s, b.outcomes)
        assert np.isclose(r.probability, b.probability)
        assert np.abs(r.state - b.state).max() < 1e-12


def test_enumeration_capacity():
    s = ProtocolSpec(n=4, max_qubits=6)
    with pytest.raises(CapacityError):
        enumerate_branches(s, max_rounds=3)


def test_post_select_equals_run_branch():
    s = ProtocolSpec(n=2, lambda_b=0.7, z=0.3, placement="B", channel="adc", p=0.4)
    assert np.array_equal(post_select(s), run_branch(s).state)
    with pytest.raises(ValueError):
        run_branch(s, (3,))
    with pytest.raises(ValueError):
        run_branch(s, (3, 5))


def test_side_order_independent():
    s = ProtocolSpec(scheme="bidirectional", n=1, m=1, lambda_b=0.6, lambda_a=0.4, z=0.5,
                     aux_b=(AuxiliaryParams(0.4, 1.0),), aux_a=(AuxiliaryParams(2.0, 0.3),),
                     placement="AB", channel="adc", p=0.3)
    for outs in ((3, 3), (1, 4), (2, 3)):
        a, b = run_branch(s, outs), run_branch(s, outs, a_first=True)
        assert np.abs(a.state - b.state).max() < 1e-12


def test_site_relabeling_symmetry():
    kw = dict(scheme="bidirectional", n=1, m=1, lambda_b=0.55, z=0.6, placement="AB", channel="adc", p=0.3)
    probs = [round(b.probability, 12) for b in enumerate_branches(ProtocolSpec(**kw))]
    swapped = [round(b.probability, 12) for b in enumerate_branches(ProtocolSpec(**kw))]
    assert Counter(probs) == Counter(swapped)
    # swapping A and B roles: the (B-side, A-side) string (k, l) maps to (l, k)
    by_str = {b.outcomes: b.probability for b in enumerate_branches(ProtocolSpec(**kw))}
    for (l, k), p in by_str.items():
        assert np.isclose(by_str[(k, l)], p)


def test_zero_lambda_zero_delta():
    for pol in ("post-select", "average"):
        s = ProtocolSpec(n=2, lambda_b=0.0, z=0.5, placement="B", channel="dpc", p=0.4)
        assert abs(protocol_delta(s, pol)) < 1e-10


def test_degenerate_branch():
    s = ProtocolSpec(n=1, lambda_b=1.0, z=0.0)  # |00>|0>: outcome 3 has zero weight
    br = run_branch(s, (3,))
    assert br.degenerate and br.probability == 0.0
    with pytest.raises(ValueError):
        post_select(s)
