import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fhc.boundary import lambda_of_z, solve_all_ti, solve_symmetric
from fhc.errors import DegenerateDenominator, InvalidParameter
from fhc.extremality import (
    Verdict,
    classify,
    critical_z_closed_form,
    kappa_direct,
    kappa_gamma,
    printed_eigenvalues,
    report_for,
    spectrum,
    thresholds,
    transition_kernel,
    verdict_for,
)
from fhc.model import GraphSpec, ModelParams, preset

SQ3 = math.sqrt(3.0)


@pytest.mark.parametrize(
    "name, z, rows",
    [
        ("rod", 1.0, [[0, 0.5, 0.5], [0.5, 0.5, 0], [0.5, 0, 0.5]]),
        ("loop", 1.0, [[1 / 3, 1 / 3, 1 / 3], [0.5, 0.5, 0], [0.5, 0, 0.5]]),
        ("rod", 2.0, [[0, 0.5, 0.5], [1 / 3, 2 / 3, 0], [1 / 3, 0, 2 / 3]]),
    ],
)
def test_kernel_examples(name, z, rows):
    assert transition_kernel(preset(name), z, z).P == pytest.approx(np.array(rows), abs=1e-15)


def test_kernel_matches_published_matrices():
    for z in (0.2, 1.7, 9.0):
        loop = transition_kernel(preset("loop"), z).P
        assert loop[0] == pytest.approx([1 / (1 + 2 * z), z / (1 + 2 * z), z / (1 + 2 * z)])
        assert loop[1] == pytest.approx([1 / (1 + z), z / (1 + z), 0])
        rod = transition_kernel(preset("rod"), z).P
        assert rod[0] == pytest.approx([0, 0.5, 0.5])
        assert rod[2] == pytest.approx([1 / (1 + z), 0, z / (1 + z)])


def test_kernel_support_and_rows(graph):
    for z1, z2 in [(0.3, 0.3), (2.0, 0.05), (10.0, 3.0)]:
        P = transition_kernel(graph, z1, z2).P
        assert np.all(np.abs(P.sum(axis=1) - 1) <= 1e-14)
        assert np.all((P > 0) == (np.array(graph.adjacency) == 1))


def test_kernel_errors():
    with pytest.raises(InvalidParameter):
        transition_kernel(preset("rod"), -1.0, 1.0)


@pytest.mark.parametrize(
    "name, z, expected",
    [("rod", 1.0, (-0.5, 0.5)), ("rod", 2.0, (-1 / 3, 2 / 3)), ("loop", 1.0, (-1 / 6, 0.5))],
)
def test_spectrum_examples(name, z, expected):
    sp = spectrum(transition_kernel(preset(name), z))
    assert (sp.s1, sp.s2) == pytest.approx(expected, abs=1e-14)
    assert sp.s3 == 1.0


def test_loop_spectrum_trace():
    for z in (0.1, 0.5, 1.0, 3.0):
        P = transition_kernel(preset("loop"), z).P
        sp = spectrum(transition_kernel(preset("loop"), z))
        assert sp.s1 + sp.s2 + sp.s3 == pytest.approx(1 / (1 + 2 * z) + 2 * z / (1 + z), abs=1e-14)
        assert sp.s1 == pytest.approx(-z / ((z + 1) * (2 * z + 1)), abs=1e-14)
        assert np.trace(P) == pytest.approx(sp.s1 + sp.s2 + 1, abs=1e-14)


def test_rod_printed_eigenvalues_agree():
    for z in (0.1, 1.0, 4.0):
        sp = spectrum(transition_kernel(preset("rod"), z))
        assert printed_eigenvalues("rod", z)[:2] == pytest.approx((sp.s1, sp.s2), abs=1e-14)


def test_loop_printed_s1_fails_trace():
    z = 2.0
    s1 = printed_eigenvalues("loop", z)[0]
    P = transition_kernel(preset("loop"), z).P
    assert abs(s1 + z / (1 + z) + 1 - np.trace(P)) > 1e-3


@settings(max_examples=80, deadline=None)
@given(z1=st.floats(1e-3, 1e3), z2=st.floats(1e-3, 1e3), name=st.sampled_from(["loop", "rod"]))
def test_spectrum_against_numpy(z1, z2, name):
    K = transition_kernel(preset(name), z1, z2)
    sp = spectrum(K)
    ref = np.sort(np.linalg.eigvals(K.P).real)
    assert sorted([sp.s1, sp.s2, sp.s3]) == pytest.approx(ref, abs=1e-9)
    assert sp.s0 == pytest.approx(max(abs(sp.s1), abs(sp.s2)))


def test_eigenvector_0_1_minus1(graph):
    v = np.array([0.0, 1.0, -1.0])
    for z in (0.01, 0.5, 1.0, 7.0, 300.0):
        P = transition_kernel(graph, z).P
        assert P @ v == pytest.approx(z / (1 + z) * v, abs=1e-14)


@pytest.mark.parametrize("name, z, kappa", [("rod", 0.5, 2 / 3), ("rod", 3.0, 0.75), ("rod", 1.0, 0.5)])
def test_kappa_examples(name, z, kappa):
    kg = kappa_gamma(preset(name), z)
    assert kg.kappa == pytest.approx(kappa, abs=1e-15)
    assert kg.gamma == kg.kappa
    assert kg.agrees


def test_kappa_closed_forms_match_definition(graph):
    for z in np.geomspace(1e-3, 1e3, 31):
        kg = kappa_gamma(graph, float(z))
        assert kg.kappa == pytest.approx(kg.kappa_direct, abs=1e-12)


def test_kappa_direct_custom():
    P = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1.0]])
    assert kappa_direct(P) == 1.0


@pytest.mark.parametrize(
    "ks, msw, verdict",
    [(1.2, 1.2, Verdict.NON_EXTREME), (0.5, 0.5, Verdict.EXTREME), (1.2, 0.5, Verdict.CONFLICT),
     (0.5, 1.5, Verdict.UNDETERMINED), (1.0, 0.99, Verdict.EXTREME)],
)
def test_verdict_rule(ks, msw, verdict):
    assert verdict_for(ks, msw) is verdict


@pytest.mark.parametrize(
    "name, lam, verdict",
    [("rod", 1.0, Verdict.EXTREME), ("rod", 3.0, Verdict.NON_EXTREME),
     ("rod", 0.1, Verdict.NON_EXTREME), ("loop", 0.5, Verdict.EXTREME)],
)
def test_classify_examples(name, lam, verdict):
    assert classify(ModelParams.of(name, 3, lam)).verdict is verdict


def test_no_conflict_rod_grid():
    for lam in np.geomspace(0.05, 20, 200):
        assert classify(ModelParams.of("rod", 3, float(lam))).verdict is not Verdict.CONFLICT


def test_report_for_asymmetric_point():
    sols = solve_all_ti(ModelParams.of("rod", 3, 1.0))
    asym = [p for p in sols if not p.symmetric][0]
    rep = report_for(asym)
    assert rep.kappa == pytest.approx(rep.kappa_direct)
    assert rep.verdict in set(Verdict)
    assert rep.as_dict()["verdict"] == rep.verdict.value


def test_rod_thresholds():
    th = thresholds(preset("rod"), 3)
    assert [t.lam for t in th] == pytest.approx([0.4421534328, 2.103133692], abs=1e-6)
    assert all(t.routes_agree for t in th)
    assert [t.closed_form_z for t in th] == pytest.approx([SQ3 - 1, 1 / (SQ3 - 1)], rel=1e-15)


def test_loop_thresholds():
    k2 = thresholds(preset("loop"), 2)
    assert [t.lam for t in k2] == pytest.approx([7.0355], abs=5e-4)
    k3 = thresholds(preset("loop"), 3)
    assert len(k3) == 1
    assert k3[0].lam == pytest.approx(lambda_of_z(preset("loop"), 3, 1 / (SQ3 - 1)), abs=1e-8)


def test_thresholds_empty_for_k1():
    assert thresholds(preset("rod"), 1, presieve=50) == []


def test_critical_z_loop_large_k_has_s1_branch():
    """For k >= 34 the loop's s1 branch has real crossings, but s2 dominates there."""
    zs = critical_z_closed_form(preset("loop"), 40)
    assert [w for _, w in zs] == ["s2"]


def test_diagnostic_functions_match_ks():
    for lam in np.geomspace(0.05, 20, 60):
        rep = classify(ModelParams.of("rod", 3, float(lam)))
        z = rep.fixed_point.z1
        q, w = (SQ3 - 1) * z - 1, z - SQ3 + 1
        if z > 1:
            assert (q > 0) == (rep.ks_value > 1)
        elif z < 1:
            assert (w < 0) == (rep.ks_value > 1)


def test_custom_graph_classify_uses_direct_kappa():
    g = GraphSpec("custom", ((1, 1, 1), (1, 1, 1), (1, 1, 1)))
    rep = report_for(solve_symmetric(ModelParams(g, 3, ModelParams.of("loop", 3, 1.0).activity)))
    assert rep.kappa == rep.kappa_direct
    assert rep.verdict is Verdict.EXTREME
