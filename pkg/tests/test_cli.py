import subprocess
import sys

import pytest

from authlab.cli import _config, _parser, main
from authlab.registry import load_state
from authlab.transcript import import_transcript


@pytest.mark.parametrize("scheme", ["jiang", "proposed"])
def test_demo_tiny(scheme, capsys):
    assert main(["demo", "--scheme", scheme, "--params", "tiny"]) == 0
    out = capsys.readouterr().out
    assert "login (new password)" in out and "FAIL" not in out


def test_demo_jiang_skew(capsys):
    assert main(["demo", "--scheme", "jiang", "--skew", "3"]) == 1
    assert "stale-timestamp" in capsys.readouterr().out


def test_demo_wrong_change_password(capsys):
    assert main(["demo", "--params", "tiny", "--wrong-change-password"]) == 1
    assert "bad-credentials" in capsys.readouterr().out


def test_demo_state_and_transcript(tmp_path, capsys):
    state, tr = tmp_path / "state.bin", tmp_path / "t.txt"
    assert main(["demo", "--state", str(state), "--persist-master-key", "--transcript", str(tr)]) == 0
    assert load_state(state).records
    assert len(import_transcript(tr)) > 0


def test_demo_refuses_damaged_state(tmp_path, capsys):
    state = tmp_path / "state.bin"
    state.write_bytes(b"junk")
    assert main(["demo", "--params", "tiny", "--state", str(state)]) == 2
    assert main(["demo", "--params", "tiny", "--state", str(state), "--force"]) == 0


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("AUTHLAB_SEED", "41")
    assert _config(_parser().parse_args(["cost"])).seed == 41
    assert _config(_parser().parse_args(["cost", "--seed", "3"])).seed == 3
    monkeypatch.setenv("AUTHLAB_SEED", "x")
    with pytest.raises(SystemExit):
        _config(_parser().parse_args(["cost"]))


def test_cost_command(capsys):
    assert main(["cost", "--machine"]) == 0
    assert "proposed\tlogin\t5\t1\t0" in capsys.readouterr().out


def test_attacks_bad_dictionary(tmp_path, capsys):
    assert main(["attacks", "--dict", str(tmp_path / "missing.txt")]) == 2
    empty = tmp_path / "empty.txt"
    empty.write_text("\n")
    assert main(["attacks", "--dict", str(empty)]) == 2


def test_attacks_with_dictionary_file(tmp_path, capsys):
    words = tmp_path / "words.txt"
    words.write_text("\n".join(f"word{i:03d}" for i in range(60)))
    assert main(["attacks", "--dict", str(words), "--seed", "2"]) == 0


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["demo", "--params", "2048"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "authlab", "demo", "--params", "tiny"], capture_output=True, text=True
    )
    assert res.returncode == 0, res.stdout + res.stderr
