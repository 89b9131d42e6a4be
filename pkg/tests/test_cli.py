import json
import subprocess
import sys

import pytest

from gabkron import keyio
from gabkron.cli import main

SEED = "ab" * 32
SET = "new-gabkron-128"


@pytest.fixture(scope="module")
def keydir(tmp_path_factory):
    d = tmp_path_factory.mktemp("keys")
    rc = main([
        "keygen", "--set", SET, "--seed", SEED,
        "--pk", str(d / "pk.bin"), "--sk", str(d / "sk.bin"),
    ])
    assert rc == 0
    return d


def test_keygen_deterministic(keydir, tmp_path):
    rc = main([
        "keygen", "--set", SET, "--seed", SEED,
        "--pk", str(tmp_path / "pk2.bin"), "--sk", str(tmp_path / "sk2.bin"),
    ])
    assert rc == 0
    assert (tmp_path / "pk2.bin").read_bytes() == (keydir / "pk.bin").read_bytes()
    assert (tmp_path / "sk2.bin").read_bytes() == (keydir / "sk.bin").read_bytes()


def test_pk_file_size_matches_published_table(keydir):
    header = 4 + 2 + 13 * 4
    assert (keydir / "pk.bin").stat().st_size == header + 4050


def test_keygen_rejects_original_set(tmp_path, capsys):
    rc = main([
        "keygen", "--set", "gabkron-128-original",
        "--pk", str(tmp_path / "pk"), "--sk", str(tmp_path / "sk"),
    ])
    assert rc == 2
    err = capsys.readouterr().err
    assert "t <= floor((n2-k2)/(2*lambda))" in err
    assert "bound=2" in err


def test_encrypt_decrypt_round_trip(keydir, tmp_path):
    msg = bytes(range(256)) + b"round trip payload"
    (tmp_path / "msg.bin").write_bytes(msg)
    rc = main([
        "encrypt", "--pk", str(keydir / "pk.bin"),
        "--in", str(tmp_path / "msg.bin"), "--out", str(tmp_path / "ct.bin"),
        "--seed", SEED,
    ])
    assert rc == 0
    rc = main([
        "decrypt", "--sk", str(keydir / "sk.bin"),
        "--in", str(tmp_path / "ct.bin"), "--out", str(tmp_path / "out.bin"),
    ])
    assert rc == 0
    assert (tmp_path / "out.bin").read_bytes() == msg


def test_encrypt_deterministic(keydir, tmp_path):
    (tmp_path / "m").write_bytes(b"same bytes")
    for name in ("c1", "c2"):
        assert main([
            "encrypt", "--pk", str(keydir / "pk.bin"),
            "--in", str(tmp_path / "m"), "--out", str(tmp_path / name),
            "--seed", SEED,
        ]) == 0
    assert (tmp_path / "c1").read_bytes() == (tmp_path / "c2").read_bytes()


def test_full_capacity_message(keydir, tmp_path):
    pk = keyio.parse_public_key((keydir / "pk.bin").read_bytes())
    cap = keyio.message_capacity(pk.params)
    msg = bytes(i % 251 for i in range(cap))
    (tmp_path / "m").write_bytes(msg)
    assert main([
        "encrypt", "--pk", str(keydir / "pk.bin"),
        "--in", str(tmp_path / "m"), "--out", str(tmp_path / "c"),
        "--seed", SEED,
    ]) == 0
    assert main([
        "decrypt", "--sk", str(keydir / "sk.bin"),
        "--in", str(tmp_path / "c"), "--out", str(tmp_path / "o"),
    ]) == 0
    assert (tmp_path / "o").read_bytes() == msg


def test_oversized_message_rejected(keydir, tmp_path, capsys):
    pk = keyio.parse_public_key((keydir / "pk.bin").read_bytes())
    (tmp_path / "m").write_bytes(bytes(keyio.message_capacity(pk.params) + 1))
    rc = main([
        "encrypt", "--pk", str(keydir / "pk.bin"),
        "--in", str(tmp_path / "m"), "--out", str(tmp_path / "c"),
    ])
    assert rc == 4


def test_truncated_ciphertext_is_parse_error(keydir, tmp_path):
    (tmp_path / "trunc").write_bytes(b"GKPC" + b"\x00" * 10)
    rc = main([
        "decrypt", "--sk", str(keydir / "sk.bin"),
        "--in", str(tmp_path / "trunc"), "--out", str(tmp_path / "o"),
    ])
    assert rc == 4


def test_missing_input_file(keydir, tmp_path):
    rc = main([
        "encrypt", "--pk", str(keydir / "pk.bin"),
        "--in", str(tmp_path / "nope"), "--out", str(tmp_path / "c"),
    ])
    assert rc == 4


def test_wrong_key_kind_rejected(keydir, tmp_path):
    # feeding the secret key where the public key belongs fails on length
    (tmp_path / "m").write_bytes(b"x")
    rc = main([
        "encrypt", "--pk", str(keydir / "sk.bin"),
        "--in", str(tmp_path / "m"), "--out", str(tmp_path / "c"),
    ])
    assert rc == 4


def test_mismatched_secret_key(keydir, tmp_path):
    # decrypting with an unrelated secret key must not pretend to succeed
    other = "cd" * 32
    rc = main([
        "keygen", "--set", SET, "--seed", other,
        "--pk", str(tmp_path / "pk2"), "--sk", str(tmp_path / "sk2"),
    ])
    assert rc == 0
    msg = b"who am I for"
    (tmp_path / "m").write_bytes(msg)
    assert main([
        "encrypt", "--pk", str(keydir / "pk.bin"),
        "--in", str(tmp_path / "m"), "--out", str(tmp_path / "c"),
        "--seed", SEED,
    ]) == 0
    rc = main([
        "decrypt", "--sk", str(tmp_path / "sk2"),
        "--in", str(tmp_path / "c"), "--out", str(tmp_path / "o"),
    ])
    if rc == 0:
        assert (tmp_path / "o").read_bytes() != msg
    else:
        assert rc == 3


def test_audit_all_passes(capsys):
    assert main(["audit", "--all"]) == 0
    out = capsys.readouterr().out
    assert "match=True" in out
    assert "match=False" not in out


def test_audit_json_report(tmp_path, capsys):
    rc = main([
        "audit", "--all", "--format", "json", "--out", str(tmp_path / "rep.json"),
    ])
    assert rc == 0
    data = json.loads((tmp_path / "rep.json").read_text())
    assert all(row["match"] for row in data["tables"])


def test_audit_prop1(capsys):
    rc = main(["audit", "--prop1", "--trials", "10", "--seed", SEED])
    assert rc == 0
    out = capsys.readouterr().out
    assert "prop1.circulant_s_found=0" in out


def test_audit_lemmas(capsys):
    rc = main(["audit", "--lemmas", "--trials", "10", "--seed", SEED])
    assert rc == 0
    out = capsys.readouterr().out
    assert "lemmas" in out


def test_bad_seed_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["keygen", "--set", SET, "--seed", "zz", "--pk", "p", "--sk", "s"])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "gabkron.cli", "audit", "--all"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
