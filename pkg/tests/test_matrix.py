import pytest

from authlab.crypto import gen_group_params
from authlab.harness.matrix import ROWS, MatrixConfig, attack_matrix

# expected columns: True = attribute holds
EXPECTED_COLUMNS = {
    "User anonymity": (False, True),
    "Insider attack": (False, True),
    "On-line password guessing attack": (False, True),
    "Off-line password guessing attack": (False, True),
    "Forward secrecy": (True, True),
    "User impersonation attack": (False, True),
    "Replay attack": (True, True),
    "Time synchronization problem": (False, True),
    "Efficient login phase": (False, True),
    "User-friendly password change phase": (False, True),
    "Session key verification": (False, True),
    "Smart card revocation": (False, True),
}


@pytest.fixture(scope="module")
def default_matrix():
    return attack_matrix(0)


def test_rows_cover_core_attributes():
    assert {r.attribute for r in ROWS if r.core} == set(EXPECTED_COLUMNS)
    for r in ROWS:
        if r.core:
            assert (r.expected_jiang, r.expected_proposed) == EXPECTED_COLUMNS[r.attribute]


def test_default_matrix_matches(default_matrix):
    assert default_matrix.matches, default_matrix.divergences()
    for attr, (j, p) in EXPECTED_COLUMNS.items():
        assert default_matrix.cell(attr, "jiang") is j
        assert default_matrix.cell(attr, "proposed") is p


def test_every_success_has_evidence(default_matrix):
    for row in default_matrix.rows:
        for rep in row.reports.values():
            if rep is not None:
                assert rep.evidence, (row.spec.attribute, rep.scheme)


def test_render(default_matrix):
    text = default_matrix.render()
    assert "User anonymity" in text and "×" in text and "√" in text
    assert "matrix matches" in text
    machine = default_matrix.render(machine=True).splitlines()
    assert machine[0].startswith("attribute\tjiang\tproposed")
    assert len(machine) == 1 + len(ROWS)
    assert all(line.count("\t") == 6 for line in machine)


def test_other_seed_also_matches():
    assert attack_matrix(7).matches


def test_duplicate_registration_disabled_diverges():
    cfg = MatrixConfig(params=gen_group_params("test-512"), allow_duplicates=False)
    result = attack_matrix(config=cfg)
    assert not result.matches
    assert result.cell("Off-line password guessing attack", "jiang") is True
    assert "Off-line password guessing attack" in result.divergences()
    # revocation is still broken without duplicates: the victim cannot even re-register
    assert result.cell("Smart card revocation", "jiang") is False
