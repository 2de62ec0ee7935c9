import math

import pytest

import aois

FORK = """
BAYES
5
2 2 2 2 2
5
1 0
2 0 1
2 0 2
2 1 3
2 2 4
2
0.4 0.6
4
0.8 0.2 0.3 0.7
4
0.5 0.5 0.1 0.9
4
0.7 0.3 0.2 0.8
4
0.6 0.4 0.25 0.75
"""


@pytest.fixture(scope="module")
def fork():
    net = aois.parse_network(FORK)
    ev = aois.parse_evidence("2 3 1 4 0", net)
    return net, ev


def test_parse_and_shape(fork):
    net, ev = fork
    assert net.num_vars == 5
    assert net.cardinality(0) == 2
    assert len(ev) == 2


def test_exact_pe_methods_agree(fork):
    net, ev = fork
    a = aois.exact_pe(net, ev, method="enum")
    b = aois.exact_pe(net, ev, method="aosearch")
    assert a == pytest.approx(b, abs=1e-12)
    assert 0.0 < math.exp(a) < 1.0


def test_estimate_runs_and_is_reproducible(fork):
    net, ev = fork
    kwargs = dict(estimators=["is", "aotree", "aograph"], samples=2000, seed=5)
    rows1 = aois.estimate(net, ev, **kwargs)
    rows2 = aois.estimate(net, ev, **kwargs)
    assert [r["estimate"] for r in rows1] == [r["estimate"] for r in rows2]

    exact = math.exp(aois.exact_pe(net, ev))
    for row in rows1:
        assert row["estimate"] == pytest.approx(exact, rel=0.15)


def test_single_sample_collapses_estimators(fork):
    net, ev = fork
    rows = aois.estimate(net, ev, samples=1, seed=3)
    values = {r["estimator"]: r["estimate"] for r in rows}
    assert values["is"] == pytest.approx(values["aotree"], rel=1e-12)
    assert values["is"] == pytest.approx(values["aograph"], rel=1e-12)


def test_variance_study_ordering(fork):
    net, ev = fork
    rows = aois.variance_study(net, ev, samples=40, replicates=600, seed=2,
                               proposal="uniform", threads=2)
    var = {r["estimator"]: r["variance"] for r in rows}
    assert var["aograph"] <= var["aotree"] * 1.10
    assert var["aotree"] <= var["is"] * 1.10


def test_info_contexts(fork):
    net, ev = fork
    info = aois.info(net, ev)
    assert info["n"] == 5
    assert info["evidence"] == 2
    assert info["induced_width"] == 1
    assert info["contexts"][0] == [0]
    assert sorted(info["contexts"][1]) == [0, 1]


def test_errors_surface_as_python_exceptions():
    with pytest.raises(ValueError):
        aois.parse_network("MARKOV 1 2 1 1 0 2 0.5 0.5")
    net = aois.parse_network(FORK)
    with pytest.raises(ValueError):
        aois.parse_evidence("1 9 0", net)
