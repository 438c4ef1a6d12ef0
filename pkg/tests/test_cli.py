import hashlib

import pytest

from csaforge.cli import main


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


@pytest.fixture(scope="module")
def point_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("pts") / "p7.txt"
    assert run(["rowen", "sample", "--field", "F16", "--count", "1", "--seed", "7",
                "-o", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def cert_file(point_file):
    out = point_file.with_suffix(".cert")
    assert run(["rowen", "build", str(point_file), "--check-split", "-o", str(out)]) == 0
    return out


def test_sample_is_deterministic(point_file, tmp_path):
    again = tmp_path / "again.txt"
    assert run(["rowen", "sample", "--field", "F16", "--seed", "7", "-o", str(again)]) == 0
    assert again.read_bytes() == point_file.read_bytes()
    assert point_file.read_text().startswith("csa-forge/1\n")


def test_global_seed_is_used(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(["--seed", "7", "rowen", "sample", "--field", "F16", "-o", str(a)]) == 0
    assert run(["rowen", "sample", "--field", "F16", "--seed", "7", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_many_into_directory(tmp_path):
    assert run(["--jobs", "2", "rowen", "sample", "--field", "F16", "--count", "3", "--seed",
                "1", "-o", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == \
        ["point_0001.txt", "point_0002.txt", "point_0003.txt"]


def test_build_and_verify(cert_file):
    assert run(["rowen", "verify", str(cert_file)]) == 0


def test_tampered_certificate_exit_1(cert_file, tmp_path, capsys):
    lines = cert_file.read_text().splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("aux q "))
    lines[i] += "+1"
    bad = tmp_path / "bad.cert"
    bad.write_text("\n".join(lines) + "\n")
    assert run(["rowen", "verify", str(bad)]) == 1
    assert "digest" in capsys.readouterr().err
    # with a matching digest the rebuild comparison catches it
    body = "\n".join(lines[:-1]) + "\n"
    bad.write_text(body + f"digest {hashlib.sha256(body.encode()).hexdigest()}\n")
    assert run(["rowen", "verify", str(bad)]) == 1


def test_invalid_point_exit_1(point_file, tmp_path, capsys):
    lines = point_file.read_text().splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("b "))
    lines[i] += "+1"
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    assert run(["rowen", "build", str(bad), "-o", str(tmp_path / "x.cert")]) == 1
    assert "bu^2=h" in capsys.readouterr().err


def test_replay_writes_verifiable_transcript(point_file, tmp_path):
    tr = tmp_path / "chain.tr"
    assert run(["brauer", "replay", str(point_file), "-o", str(tr)]) == 0
    assert run(["brauer", "verify", str(tr)]) == 0
    text = tr.read_text().splitlines()
    i = next(k for k, ln in enumerate(text) if ln.startswith("STEP"))
    parts = text[i].split(" | ")
    parts[-1] = parts[-1] + "+1"
    text[i] = " | ".join(parts)
    tr.write_text("\n".join(text) + "\n")
    assert run(["brauer", "verify", str(tr)]) == 1


def test_empty_transcript_exit_0(tmp_path):
    tr = tmp_path / "empty.tr"
    tr.write_text("csa-forge/1\n")
    assert run(["brauer", "verify", str(tr)]) == 0


def test_symbol_commands(tmp_path):
    out = tmp_path / "sym.txt"
    assert run(["symbol", "build", "--field", "F9", "--a", "g", "--b", "1", "-o", str(out)]) == 0
    assert "report csa" in out.read_text()
    assert run(["symbol", "split", "--field", "F8", "--a", "g", "--b", "g", "-o",
                str(tmp_path / "s.txt")]) == 0
    assert "rank=4/4" in (tmp_path / "s.txt").read_text()
    assert run(["symbol", "split", "--field", "F8", "--a", "g", "--b", "g",
                "--witness", "g,0", "-o", str(tmp_path / "s2.txt")]) == 1


def test_dec_commands(tmp_path):
    rec = tmp_path / "rec.txt"
    assert run(["dec", "descend", "--field", "F16", "--basis", "1,g", "--classes", "g^3,g^2+1",
                "-o", str(rec)]) == 0
    assert run(["dec", "verify", str(rec)]) == 0
    lines = rec.read_text().splitlines()
    i = next(k for k, ln in enumerate(lines) if ln.startswith("x "))
    lines[i] += "+1"
    rec.write_text("\n".join(lines) + "\n")
    assert run(["dec", "verify", str(rec)]) == 1
    rec2 = tmp_path / "rec2.txt"
    assert run(["dec", "descend", "--field", "F16", "--over", "F16(t)", "--basis", "1,g",
                "--classes", "t,g", "--bslots", "t+1,t", "-o", str(rec2)]) == 0
    assert "generators x,b1,b2" in rec2.read_text()
    assert run(["dec", "verify", str(rec2)]) == 0


@pytest.mark.parametrize("argv", [
    ["rowen", "sample", "--field", "F6"],
    ["rowen", "sample", "--field", "F16", "--count", "0"],
    ["symbol", "build", "--field", "F4", "--a", "g"],
    ["dec", "descend", "--field", "F16", "--basis", "1,1", "--classes", "g,g"],
    ["dec", "descend", "--field", "F16", "--basis", "1,g", "--classes", "g"],
    ["--jobs", "0", "brauer", "verify", "x"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(argv):
    assert run(argv) == 2


def test_missing_file_is_usage_error(tmp_path):
    assert run(["brauer", "verify", str(tmp_path / "nope.tr")]) == 2
