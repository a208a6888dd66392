import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vqx.ansatz import uccsd_generators
from vqx.cases import H2
from vqx.encoding import build_observables, encode_occupation
from vqx.objectives import (ObjectiveContext, ObjectiveSpec, SmoothDeflation, constraint_penalty, deflation_term,
                            evaluate, evaluate_ssvqe, evaluate_vqe, resolve_targets, smooth_deflation_term,
                            spectral_ceiling, tabu_penalty)
from vqx.oracle import fci_spectrum, target_level
from vqx.optimizer import OptimizerConfig, powell_minimize
from vqx.simulator import StateVector, basis_state, expectation

# frozen from the printed formula with a=1, b=0.5, r=r_d=1, E_p=-1, unit overlap:
# (0.5 a + 0.5 b) * (g + (1 - g) * (-(1 + 4 (sqrt5 + 1)) / 4)), g = 1 / (e^0.75 + 1)
SMOOTH_GOLDEN = -1.5351313600280199


def ket(occ):
    return basis_state(encode_occupation(occ, "bk"))


def phased(s, phi):
    return StateVector(s.amplitudes * np.exp(1j * phi), s.n_qubits)


class TestPenalties:
    def test_constraint_satisfied(self, obs_bk):
        assert constraint_penalty(ket("1100"), [(obs_bk.number, 2)]) == 0

    def test_constraint_linear(self, obs_bk):
        assert constraint_penalty(ket("1000"), [(obs_bk.sz, 0)]) == pytest.approx(0.5)

    def test_tabu_peak(self, obs_bk):
        assert tabu_penalty(ket("1000"), [(obs_bk.s2, 0.75)]) == pytest.approx(100)

    def test_tabu_sentinel_is_inert(self, obs_bk):
        assert tabu_penalty(ket("1100"), [(obs_bk.number, 10000)]) < 1e-300

    def test_tabu_gaussian_width(self, obs_bk):
        # <S2> = 0 on the closed shell; 100 exp(-100 * 0.75^2)
        assert tabu_penalty(ket("1100"), [(obs_bk.s2, 0.75)]) == pytest.approx(100 * math.exp(-56.25))

    @given(st.floats(0, 2 * math.pi))
    def test_global_phase_invariance(self, phi):
        obs = build_observables(2, "bk")
        s = StateVector(np.arange(16) + 1j, normalize=True)
        for fn in (lambda x: constraint_penalty(x, [(obs.sz, 0.3), (obs.s2, 1)]),
                   lambda x: tabu_penalty(x, [(obs.s2, 0.75)], 3.0, 2.0)):
            assert fn(phased(s, phi)) == pytest.approx(fn(s), abs=1e-12)

    def test_resolve_unknown(self, obs_bk):
        with pytest.raises(KeyError):
            resolve_targets([("Q", 1)], obs_bk)


class TestDeflation:
    def test_no_previous(self):
        assert deflation_term(ket("1100"), []) == 0

    def test_identical(self):
        assert deflation_term(ket("1100"), [ket("1100")], 1.0) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert deflation_term(ket("1100"), [ket("0011"), ket("0110")], 5.0) == 0

    def test_smooth_golden(self):
        s = ket("1100")
        assert smooth_deflation_term(s, [s], 1.0, 1.0, -1.0, a=1.0, b=0.5) == pytest.approx(SMOOTH_GOLDEN, abs=1e-12)

    def test_smooth_b_branch_vanishes_far_below_r_d(self):
        s = ket("1100")
        vals = [smooth_deflation_term(s, [s], 0.5, 2.0, -1.0, b=b) for b in (0.0, 3.0, -7.0)]
        assert max(vals) - min(vals) < 1e-12

    def test_smooth_zero_overlap(self):
        assert smooth_deflation_term(ket("1100"), [ket("0011")], 1.0, 1.0, -1.0) == 0

    def test_smooth_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            smooth_deflation_term(ket("1100"), [], 0.0, 1.0, -1.0)


class TestSpec:
    def test_default_weights(self):
        assert ObjectiveSpec(mode="ssvqe", group_size=2).weights == (2.0, 1.0)

    @pytest.mark.parametrize("w", [(1, 2), (1, 1), (2, -1)])
    def test_bad_weights(self, w):
        with pytest.raises(ValueError):
            ObjectiveSpec(mode="ssvqe", group_size=2, weights=w)

    def test_round_trip(self):
        spec = ObjectiveSpec(mode="ssvqe", group_size=2, tabu_targets=[("S2", 0.75)],
                             smooth_deflation=SmoothDeflation(1.0, 2.0, b=0.3))
        assert ObjectiveSpec.from_dict(spec.to_dict()) == spec


def context(H, occs, mode="vqe", prev=(), prev_e=(), cons=None, tabu=None, **kw):
    spec = ObjectiveSpec(mode=mode, group_size=len(occs), **kw)
    ans = uccsd_generators(4, list(occs), "bk")
    return ObjectiveContext(H, ans, [ket(o) for o in occs], spec, list(prev), list(prev_e), cons, tabu,
                            observables=build_observables(2, "bk"))


class TestEvaluation:
    def test_plain_energy_at_zero(self, h2_bk):
        ctx = context(h2_bk, ["1100"])
        assert evaluate_vqe(np.zeros(3), ctx) == pytest.approx(expectation(ket("1100"), h2_bk))

    def test_satisfied_penalties_vanish(self, h2_bk, obs_bk):
        ctx = context(h2_bk, ["1100"], prev=[ket("0011")], prev_e=[0.0],
                      cons=[[(obs_bk.number, 2), (obs_bk.sz, 0)]], tabu=[[(obs_bk.number, 10000)]])
        assert evaluate(np.zeros(3), ctx) == pytest.approx(expectation(ket("1100"), h2_bk))

    def test_ssvqe_single_state_is_vqe(self, h2_bk, rng):
        theta = rng.uniform(-1, 1, 3)
        a = evaluate_ssvqe(theta, context(h2_bk, ["1100"], mode="ssvqe"))
        assert a == pytest.approx(evaluate_vqe(theta, context(h2_bk, ["1100"])))

    def test_ssvqe_weighted_sum_at_zero(self, h2_bk):
        ctx = context(h2_bk, ["1100", "0110"], mode="ssvqe")
        want = 2 * expectation(ket("1100"), h2_bk) + expectation(ket("0110"), h2_bk)
        assert evaluate(np.zeros(ctx.ansatz.parameter_count), ctx) == pytest.approx(want)

    def test_initial_states_must_be_orthogonal(self, h2_bk):
        with pytest.raises(ValueError):
            context(h2_bk, ["1100", "1100"], mode="ssvqe")

    def test_shifted_weight_clears_spectrum(self, h2_bk):
        ctx = context(h2_bk, ["0110"], prev=[ket("1100")], prev_e=[-1.1])
        top = np.linalg.eigvalsh(h2_bk.matrix())[-1]
        assert spectral_ceiling(h2_bk) >= top
        assert ctx.deflation_weights()[0] >= 1.0 + top + 1.1 - 1e-12

    def test_plain_weight_without_shift(self, h2_bk):
        ctx = context(h2_bk, ["0110"], prev=[ket("1100")], prev_e=[-1.1], deflation_shift=False)
        assert ctx.deflation_weights()[0] == 1.0


@pytest.fixture
def levels(h2_bk, obs_bk):
    return fci_spectrum(h2_bk, obs_bk)


class TestEndToEnd:
    def test_constrained_ground(self, h2_bk, levels):
        st0 = H2.states[0]
        ctx = context(h2_bk, [st0.occupation], cons=[resolve_targets(st0.constraints, build_observables(2, "bk"))])
        res = powell_minimize(lambda t: evaluate(t, ctx), OptimizerConfig().initial_point(3))
        e = ctx.energies(res.x)[0]
        assert abs(e - target_level(levels, 2, 0, 0)) < 1e-4
        _, pen = ctx.state_values(res.x)[0]
        assert pen < 1e-3

    def test_ssvqe_orders_two_lowest(self, h2_bk, levels):
        ctx = context(h2_bk, ["1100", "0110"], mode="ssvqe")
        res = powell_minimize(lambda t: evaluate(t, ctx), OptimizerConfig().initial_point(ctx.ansatz.parameter_count))
        e0, e1 = ctx.energies(res.x)
        assert e0 == pytest.approx(target_level(levels, 2, 0, 0), abs=1e-6)
        assert e1 == pytest.approx(target_level(levels, 2, 0, 2), abs=1e-6)
        assert e0 < e1
