import pytest

from authlab.cost import HASH_TOLERANCE, REFERENCE, cost_report, render_cost


@pytest.fixture(scope="module", params=["test-tiny", "test-512"])
def rows(request):
    return {(r.scheme, r.phase): r for r in cost_report(request.param)}


def test_proposed_exponentiations_exact(rows):
    for phase, exp in (("registration", 0), ("login", 1), ("authentication", 3), ("password-change", 0)):
        r = rows[("proposed", phase)]
        assert r.measured[1] == exp
        assert r.measured[2] == 0


def test_proposed_hashes_within_tolerance(rows):
    for phase, pub in REFERENCE["proposed"].items():
        assert abs(rows[("proposed", phase)].measured[0] - pub[0]) <= HASH_TOLERANCE
        assert rows[("proposed", phase)].ok


def test_jiang_counts(rows):
    assert rows[("jiang", "login")].measured == (3, 3, 1)
    assert rows[("jiang", "authentication")].measured == (6, 2, 0)
    assert rows[("jiang", "registration")].measured[1:] == (1, 0)
    assert rows[("jiang", "password-change")].measured[1:] == (7, 3)


def test_render_mentions_mapping(rows):
    text = render_cost(list(rows.values()))
    assert "mapping" in text and "proposed/login" in text
    machine = render_cost(list(rows.values()), machine=True)
    assert machine.splitlines()[0].split("\t")[:3] == ["scheme", "phase", "T_h"]
