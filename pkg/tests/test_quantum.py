"""State geometry: rays, embeddings, quantum divergences, holonomy, charts."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infogeo import (
    BlochChart,
    Categorical,
    ChartDivergence,
    DensityMatrix,
    DiagonalQutritChart,
    DimensionMismatch,
    DomainError,
    OrthogonalLink,
    PureState,
    VeroneseChart,
    bargmann_phase,
    extract_cubic,
    extract_metric,
    fubini_study_distance,
    make_chart_divergence,
    pure_density,
    quantum_jsd,
    quantum_relative_entropy,
    veronese_embed,
    von_neumann_entropy,
)
from infogeo.quantum import parse_amplitudes

KET0 = PureState([1, 0])
KET1 = PureState([0, 1])
PLUS = PureState([1, 1])
PLUS_I = PureState([1, 1j])


def _haar_qubit(rng):
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return PureState(z)


# --- pure states and rays ----------------------------------------------------


def test_pure_state_normalizes_and_validates():
    s = PureState([3, 4])
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        PureState([0, 0])
    with pytest.raises(ValueError):
        PureState([1.0])


def test_ray_equality_ignores_global_phase():
    s = PureState([1, 1j])
    t = PureState(np.exp(1j * 0.83) * s.amplitudes)
    assert s.same_ray(t)
    assert not s.same_ray(KET0)


def test_fubini_study_reference_values():
    assert fubini_study_distance(KET0, KET0) == 0.0
    assert fubini_study_distance(KET0, KET1) == pytest.approx(math.pi / 2)
    assert fubini_study_distance(KET0, PLUS) == pytest.approx(math.pi / 4)
    with pytest.raises(DimensionMismatch):
        fubini_study_distance(KET0, PureState([1, 0, 0]))


def test_fubini_study_symmetric_and_phase_invariant():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b = _haar_qubit(rng), _haar_qubit(rng)
        assert fubini_study_distance(a, b) == pytest.approx(
            fubini_study_distance(b, a), abs=1e-15
        )
        b2 = PureState(np.exp(1j * rng.uniform(0, 2 * np.pi)) * b.amplitudes)
        assert fubini_study_distance(a, b2) == pytest.approx(
            fubini_study_distance(a, b), abs=1e-12
        )


# --- Veronese embedding ------------------------------------------------------


def test_veronese_reference_values():
    assert np.allclose(veronese_embed(KET0).amplitudes, [1, 0, 0])
    assert np.allclose(veronese_embed(KET1).amplitudes, [0, 0, 1])
    v = veronese_embed(PLUS)
    assert np.allclose(v.amplitudes, [0.5, 1 / math.sqrt(2), 0.5])
    with pytest.raises(DimensionMismatch):
        veronese_embed(PureState([1, 0, 0]))


def test_veronese_overlap_squaring_identity():
    rng = np.random.default_rng(1)
    for _ in range(500):
        p, q = _haar_qubit(rng), _haar_qubit(rng)
        lhs = abs(veronese_embed(p).overlap(veronese_embed(q)))
        rhs = abs(p.overlap(q)) ** 2
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_veronese_contracts_fubini_study_distance():
    rng = np.random.default_rng(2)
    for _ in range(100):
        p, q = _haar_qubit(rng), _haar_qubit(rng)
        d_img = fubini_study_distance(veronese_embed(p), veronese_embed(q))
        d_pre = fubini_study_distance(p, q)
        assert d_img == pytest.approx(math.acos(math.cos(d_pre) ** 2), abs=1e-9)


# --- density matrices and entropies -----------------------------------------


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix([[0.5, 0.1], [0.3, 0.5]])  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix([[0.9, 0], [0, 0.2]])  # trace != 1
    with pytest.raises(ValueError):
        DensityMatrix([[1.5, 0], [0, -0.5]])  # negative eigenvalue
    rho = DensityMatrix(np.eye(2) / 2)
    assert rho.dim == 2


def test_von_neumann_entropy_values():
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(math.log(2))
    assert von_neumann_entropy(pure_density(KET0)) == pytest.approx(0.0, abs=1e-12)


def test_qre_identical_states_is_zero():
    rho = np.eye(2) / 2
    assert quantum_relative_entropy(rho, rho, eps=0.01) == 0.0


def test_qre_commuting_reduction_reference():
    # diag(0.7, 0.3) vs diag(0.3, 0.7) as eps -> 0: the categorical value
    rho = np.diag([0.7, 0.3]).astype(complex)
    sigma = np.diag([0.3, 0.7]).astype(complex)
    expected = 0.4 * math.log(7.0 / 3.0)
    assert quantum_relative_entropy(rho, sigma, eps=1e-9) == pytest.approx(
        expected, abs=1e-8
    )


def test_qre_commuting_reduction_across_eps():
    rng = np.random.default_rng(3)
    cat2, cat3 = Categorical(2, margin=1e-15), Categorical(3, margin=1e-15)
    for _ in range(50):
        for d, cat in ((2, cat2), (3, cat3)):
            p = rng.dirichlet(np.ones(d)) * 0.98 + 0.01 / d
            q = rng.dirichlet(np.ones(d)) * 0.98 + 0.01 / d
            p, q = p / p.sum(), q / q.sum()
            for eps in (1e-3, 1e-2, 0.1):
                sp = (1 - eps) * p + eps / d
                sq = (1 - eps) * q + eps / d
                expected = cat.divergence(sp[: d - 1], sq[: d - 1])
                got = quantum_relative_entropy(np.diag(p), np.diag(q), eps=eps)
                assert got == pytest.approx(expected, abs=1e-10)


def test_qre_diverges_as_smoothing_shrinks_on_orthogonal_pures():
    rho, sigma = pure_density(KET0), pure_density(KET1)
    values = [quantum_relative_entropy(rho, sigma, eps) for eps in (0.1, 0.01, 0.001)]
    assert values[0] < values[1] < values[2]


def test_qre_validates_inputs():
    with pytest.raises(ValueError):
        quantum_relative_entropy(np.eye(2) / 2, np.eye(2) / 2, eps=0.0)
    with pytest.raises(DimensionMismatch):
        quantum_relative_entropy(np.eye(2) / 2, np.eye(3) / 3, eps=0.01)


def test_qjsd_reference_values():
    rho = pure_density(KET0)
    assert quantum_jsd(rho, rho) == 0.0
    assert quantum_jsd(rho, pure_density(KET1)) == pytest.approx(math.log(2))


def test_qjsd_symmetric_and_bounded():
    rng = np.random.default_rng(4)
    for _ in range(50):
        a = _haar_qubit(rng)
        b = _haar_qubit(rng)
        rho = 0.7 * pure_density(a).entries + 0.3 * np.eye(2) / 2
        sigma = 0.4 * pure_density(b).entries + 0.6 * np.eye(2) / 2
        v = quantum_jsd(rho, sigma)
        assert v == quantum_jsd(sigma, rho)
        assert 0.0 <= v <= math.log(2) + 1e-12


# --- holonomy ----------------------------------------------------------------


def test_octant_loop_phase():
    assert bargmann_phase([KET0, PLUS, PLUS_I]) == pytest.approx(-math.pi / 4, abs=1e-12)
    assert bargmann_phase([PLUS_I, PLUS, KET0]) == pytest.approx(math.pi / 4, abs=1e-12)
    # an explicitly closed loop gives the same answer
    assert bargmann_phase([KET0, PLUS, PLUS_I, KET0]) == pytest.approx(
        -math.pi / 4, abs=1e-12
    )


def test_identical_ray_loop_has_zero_phase():
    assert bargmann_phase([KET0, KET0, KET0]) == 0.0


def test_bargmann_rephasing_invariance():
    rng = np.random.default_rng(5)
    loop = [_haar_qubit(rng) for _ in range(5)]
    base = bargmann_phase(loop)
    for _ in range(20):
        rephased = [
            PureState(np.exp(1j * rng.uniform(0, 2 * np.pi)) * s.amplitudes)
            for s in loop
        ]
        assert bargmann_phase(rephased) == pytest.approx(base, abs=1e-12)


def test_bargmann_orthogonal_link_raises():
    with pytest.raises(OrthogonalLink):
        bargmann_phase([KET0, KET1, PLUS])
    with pytest.raises(ValueError):
        bargmann_phase([KET0, PLUS])


def test_bargmann_result_in_principal_branch():
    rng = np.random.default_rng(6)
    for _ in range(50):
        loop = [_haar_qubit(rng) for _ in range(4)]
        try:
            phase = bargmann_phase(loop)
        except OrthogonalLink:
            continue
        assert -math.pi < phase <= math.pi


# --- charts ------------------------------------------------------------------


def test_bloch_chart_reference_points():
    chart = BlochChart(eps=1e-3)
    rho = chart.point([0.0, 0.0, 0.0]).entries
    assert np.allclose(rho, np.eye(2) / 2)
    r = 0.4
    rho = chart.point([0.0, 0.0, r]).entries
    scaled = (1 - chart.eps) * r
    assert np.allclose(np.diag(rho).real, [(1 + scaled) / 2, (1 - scaled) / 2])
    with pytest.raises(DomainError):
        chart.point([0.8, 0.8, 0.8])


def test_diag_qutrit_chart_reference_points():
    chart = DiagonalQutritChart(eps=1e-3)
    rho = chart.point([1 / 3, 1 / 3]).entries
    assert np.allclose(rho, np.eye(3) / 3)
    assert not chart.contains([0.6, 0.6])


def test_veronese_chart_points_are_smoothed_projectors():
    chart = VeroneseChart(eps=1e-2)
    rho = chart.point([math.pi / 2, 0.3]).entries
    eigs = np.linalg.eigvalsh(rho)
    assert eigs.min() == pytest.approx(1e-2 / 3, rel=1e-6)
    assert eigs.max() == pytest.approx(1 - 1e-2 + 1e-2 / 3, rel=1e-6)


def test_chart_divergence_protocol_and_extraction():
    div = make_chart_divergence("qre:bloch", eps=1e-3)
    assert div.family_id == "qre:bloch"
    assert div.dimension == 3
    assert div.divergence([0, 0, 0.2], [0, 0, 0.2]) == 0.0
    # at the ball center every direction is equivalent and the commuting
    # reduction gives g = (1-eps)^2 I; the cubic vanishes by parity
    g = extract_metric(div, [0.0, 0.0, 0.0], h=1e-2, richardson=True)
    assert np.allclose(g.components, (1 - 1e-3) ** 2 * np.eye(3), atol=1e-6)
    t = extract_cubic(div, [0.0, 0.0, 0.0], h=8e-2)
    assert np.max(np.abs(t.components)) < 1e-4


def test_chart_divergence_qjsd_symmetric_probe():
    from infogeo import asymmetry_probe

    div = make_chart_divergence("qjsd:bloch", eps=1e-3)
    probe = asymmetry_probe(div, [0.1, 0.0, 0.2], [0.0, 0.0, 1.0], [0.2, 0.1, 0.05, 0.025])
    assert probe.degenerate  # JSD is symmetric in its arguments


def test_qre_diag_qutrit_matches_classical_cubic():
    # on the diagonal chart the quantum divergence is the smoothed categorical
    # KL, so extraction picks up the classical mean-chart cubic coefficient
    eps = 1e-6
    div = make_chart_divergence("qre:diag-qutrit", eps=eps)
    p = np.array([0.3, 0.4])
    t = extract_cubic(div, p, h=4e-2, richardson=True)
    oracle = Categorical(3).forward_cubic(p)
    assert np.max(np.abs(t.components - oracle)) / np.max(np.abs(oracle)) < 5e-3


def test_veronese_chart_qre_is_a_function_of_fidelity():
    # uniform smoothing keeps the spectrum of a projector fixed, so relative
    # entropy between smoothed pure states reduces to a symmetric function of
    # the fidelity: on this chart the cubic term vanishes to stencil noise,
    # and the divergence is symmetric in its arguments
    div = make_chart_divergence("qre:veronese", eps=1e-3)
    t = extract_cubic(div, [math.pi / 2, 0.0], h=5e-2)
    assert np.max(np.abs(t.components)) < 1e-6
    x, y = [1.1, 0.4], [1.4, -0.2]
    assert div.divergence(x, y) == pytest.approx(div.divergence(y, x), rel=1e-12)


def test_bloch_interior_qre_cubic_is_nonzero():
    # away from the ball center the states are genuinely mixed with varying
    # spectrum and the relative-entropy cubic term does not vanish
    div = make_chart_divergence("qre:bloch", eps=1e-3)
    t = extract_cubic(div, [0.1, 0.2, 0.3], h=5e-2, richardson=True)
    assert np.max(np.abs(t.components)) > 0.5


def test_density_matrix_json_round_trip():
    from infogeo import density_from_json, density_to_json

    chart = BlochChart(eps=1e-3)
    rho = chart.point([0.2, -0.1, 0.4])
    data = density_to_json(rho)
    assert data["dim"] == 2 and len(data["entries"]) == 4
    back = density_from_json(data)
    assert np.allclose(back.entries, rho.entries)
    with pytest.raises(ValueError):
        density_from_json({"dim": 3, "entries": data["entries"]})


def test_parse_amplitudes():
    s = parse_amplitudes("1,0")
    assert np.allclose(s.amplitudes, [1, 0])
    s = parse_amplitudes("0.7071+0i,0+0.7071i")
    assert abs(s.amplitudes[1].imag) == pytest.approx(1 / math.sqrt(2), rel=1e-4)
    with pytest.raises(ValueError):
        parse_amplitudes("not,a,number")


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_veronese_identity_hypothesis(seed):
    rng = np.random.default_rng(seed)
    p, q = _haar_qubit(rng), _haar_qubit(rng)
    assert abs(veronese_embed(p).overlap(veronese_embed(q))) == pytest.approx(
        abs(p.overlap(q)) ** 2, abs=1e-12
    )
