import numpy as np
import pytest

from modinv import core, graph_algebra, nimrep

POSITIVE = ["A2", "A9", "D4", "D6", "D8", "E6", "E8"]
NEGATIVE = ["D5", "D7", "E7"]


def test_a_series_gauge_is_s_matrix():
    k = 4
    gauge = graph_algebra.eigen_gauge(nimrep.ade_graph("A5"))
    S = core.su2_modular_data(k).S.real
    assert gauge.exponent_of == tuple(range(5))
    assert np.max(np.abs(gauge.psi.real - S)) < 1e-10
    assert np.max(np.abs(gauge.psi.imag)) < 1e-12


def test_d4_has_doubled_middle_exponent():
    gauge = graph_algebra.eigen_gauge(nimrep.ade_graph("D4"))
    assert sorted(gauge.exponent_of) == [0, 2, 2, 4]
    # the doubled columns are complex conjugates of each other
    cols = [i for i, m in enumerate(gauge.exponent_of) if m == 2]
    c1, c2 = gauge.psi[:, cols[0]], gauge.psi[:, cols[1]]
    assert np.max(np.abs(c1 - c2.conj())) < 1e-12


def test_e7_gauge_no_multiplicity():
    gauge = graph_algebra.eigen_gauge(nimrep.ade_graph("E7"))
    assert len(set(gauge.exponent_of)) == 7
    gauge.validate()


def test_dodd_base_vertex_is_fork():
    gauge = graph_algebra.eigen_gauge(nimrep.ade_graph("D5"))
    assert gauge.base == 4
    assert np.min(np.abs(gauge.psi[gauge.base])) > 1e-9


@pytest.mark.parametrize("name", POSITIVE + NEGATIVE)
def test_gauge_unitary_and_positive_base_row(name):
    gauge = graph_algebra.eigen_gauge(nimrep.ade_graph(name))
    V = gauge.graph.num_vertices
    assert np.max(np.abs(gauge.psi.conj().T @ gauge.psi - np.eye(V))) < 1e-9
    row = gauge.psi[gauge.base]
    assert row.real.min() > 0
    assert np.max(np.abs(row.imag)) < 1e-9


def test_a_series_equals_verlinde():
    for name, k in (("A5", 4), ("A9", 8)):
        fusion = graph_algebra.graph_structure_constants(
            graph_algebra.eigen_gauge(nimrep.ade_graph(name)))
        assert fusion.positive
        assert np.array_equal(fusion.rounded, core.su2_fusion_closed_form(k).N)


@pytest.mark.parametrize("name", POSITIVE)
def test_positive_cases(name):
    fusion = graph_algebra.graph_structure_constants(
        graph_algebra.eigen_gauge(nimrep.ade_graph(name)))
    assert fusion.positive
    assert fusion.integrality_gap < 1e-6
    assert fusion.associative()
    assert fusion.unit_residual() < 1e-9


@pytest.mark.parametrize("name", NEGATIVE)
def test_negative_cases(name):
    fusion = graph_algebra.graph_structure_constants(
        graph_algebra.eigen_gauge(nimrep.ade_graph(name)))
    assert not fusion.positive
    assert fusion.worst_negative < -1e-3
    # the base vertex still acts as the unit even in the negative cases
    assert fusion.unit_residual() < 1e-9


def test_positivity_report_dichotomy():
    verdicts = {v.graph: v for v in graph_algebra.positivity_report(POSITIVE + NEGATIVE)}
    for name in POSITIVE:
        assert verdicts[name].positive and verdicts[name].associative
    for name in NEGATIVE:
        assert not verdicts[name].positive
        assert verdicts[name].worst_negative < -1e-3


@pytest.mark.parametrize("name", ["A7", "D6", "E6", "E8"])
def test_gauge_diagonalizes_fused_family(name):
    g = nimrep.ade_graph(name)
    gauge = graph_algebra.eigen_gauge(g)
    family = nimrep.fused_adjacencies(g)
    assert graph_algebra.diagonalization_residual(gauge, family) < 1e-8


@pytest.mark.parametrize("name", ["A5", "D6", "E6", "E7"])
def test_sign_gauge_invariance(name):
    # flipping signs of multiplicity-one columns leaves the tensor unchanged
    rng = np.random.default_rng(7)
    gauge = graph_algebra.eigen_gauge(nimrep.ade_graph(name))
    base_fusion = graph_algebra.graph_structure_constants(gauge)
    exps = list(gauge.exponent_of)
    signs = np.array([rng.choice([-1.0, 1.0]) if exps.count(m) == 1 else 1.0
                      for m in exps])
    flipped = graph_algebra.EigenGauge(
        graph=gauge.graph, psi=gauge.psi * signs[None, :],
        exponent_of=gauge.exponent_of, base=gauge.base)
    # the flipped frame is still an eigenbasis; compare tensors directly
    psi = flipped.psi
    ratio = psi / psi[flipped.base, :][None, :]
    N = np.einsum("am,bm,cm->abc", ratio, psi, psi.conj())
    assert np.max(np.abs(N - base_fusion.Nhat)) < 1e-9


def test_csv_rows_shape():
    fusion = graph_algebra.graph_structure_constants(
        graph_algebra.eigen_gauge(nimrep.ade_graph("A3")))
    rows = graph_algebra.csv_rows(fusion)
    assert len(rows) == 27
    assert all(row[6] in ("ok", "neg", "frac") for row in rows)
