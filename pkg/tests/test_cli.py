import subprocess
import sys

import pytest

from topkdoc.cli import EXIT_CORRUPT, EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main


@pytest.fixture
def c0_file(c0_manifest, tmp_path):
    out = tmp_path / "c0.idx"
    assert main(["build", "--input", str(c0_manifest), "--measures", "tf", "mindist",
                 "--par", "doclen", "--out", str(out)]) == EXIT_OK
    return out


def test_build_reports_header(c0_manifest, tmp_path, capsys):
    out = tmp_path / "x.idx"
    assert main(["build", "--input", str(c0_manifest), "--measures", "tf", "--out", str(out)]) == 0
    line = capsys.readouterr().out
    assert "n=13" in line and "D=3" in line and "links=20" in line and "words_per_n=" in line
    assert out.exists()


def test_build_dedups_measures(c0_manifest, tmp_path, caplog):
    out = tmp_path / "x.idx"
    assert main(["build", "--input", str(c0_manifest), "--measures", "tf,tf", "docrank",
                 "--out", str(out)]) == EXIT_OK
    assert "duplicate" in caplog.text


def test_build_errors(c0_manifest, tmp_path, capsys):
    out = str(tmp_path / "x.idx")
    assert main(["build", "--input", str(c0_manifest), "--measures", "bm25", "--out", out]) == EXIT_USAGE
    bad = tmp_path / "bad.txt"
    bad.write_text("d0.txt\nnowhere.txt\n")
    assert main(["build", "--input", str(bad), "--out", out]) == EXIT_IO
    assert "nowhere.txt" in capsys.readouterr().err


def test_query(c0_file, capsys):
    assert main(["query", "--index", str(c0_file), "--pattern", "ab", "--k", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["1\td0.txt\t2", "2\td1.txt\t1"]


def test_query_online_streams_everything(c0_file, capsys):
    assert main(["query", "--index", str(c0_file), "--pattern", "b", "--online"]) == EXIT_OK
    assert [l.split("\t")[1] for l in capsys.readouterr().out.splitlines()] == \
        ["d0.txt", "d2.txt", "d1.txt"]


def test_query_param(c0_file, capsys):
    assert main(["query", "--index", str(c0_file), "--pattern", "a", "--par", "doclen",
                 "--tau-lo", "4", "--k", "5"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["1\td0.txt\t2"]


def test_query_errors(c0_file, tmp_path):
    idx = str(c0_file)
    assert main(["query", "--index", idx, "--pattern", "a", "--measure", "docrank"]) == EXIT_USAGE
    assert main(["query", "--index", idx, "--pattern", "a", "--par", "tf"]) == EXIT_USAGE
    assert main(["query", "--index", idx, "--pattern", "a", "--tau-lo", "3", "--tau-hi", "1"]) == EXIT_USAGE
    assert main(["query", "--index", str(tmp_path / "none.idx"), "--pattern", "a"]) == EXIT_IO
    with pytest.raises(SystemExit) as exc:
        main(["query", "--index", idx])
    assert exc.value.code == EXIT_USAGE


def test_query_without_par_annotation(c0_manifest, tmp_path):
    out = tmp_path / "plain.idx"
    main(["build", "--input", str(c0_manifest), "--out", str(out)])
    assert main(["query", "--index", str(out), "--pattern", "a", "--tau-lo", "1"]) == EXIT_USAGE


def test_corrupt_index_exit_code(c0_file, capsys):
    data = bytearray(c0_file.read_bytes())
    data[60] ^= 1
    c0_file.write_bytes(bytes(data))
    assert main(["query", "--index", str(c0_file), "--pattern", "a"]) == EXIT_CORRUPT
    assert "corrupt" in capsys.readouterr().err


def test_verify(c0_file, capsys):
    assert main(["verify", "--index", str(c0_file)]) == EXIT_OK
    assert main(["verify", "--index", str(c0_file), "--inject-fault"]) == EXIT_VERIFY
    out = capsys.readouterr().out
    assert "FAIL" in out and "corpus=" in out and "pattern=" in out


def test_verify_random_is_deterministic(capsys):
    assert main(["verify", "--seed", "5", "--trials", "3", "--max-len", "3"]) == EXIT_OK
    first = capsys.readouterr().out
    main(["verify", "--seed", "5", "--trials", "3", "--max-len", "3"])
    assert capsys.readouterr().out == first


def test_bench(c0_file, tmp_path, capsys):
    pats = tmp_path / "p.txt"
    pats.write_text("a\nab\nbab\n")
    assert main(["bench", "--index", str(c0_file), "--patterns", str(pats), "--k", "1,10"]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert rows[0].startswith("bucket\tk")
    assert len(rows) == 1 + 2 * 2  # buckets "1" and "2-3", two k values
    empty = tmp_path / "e.txt"
    empty.write_text("")
    assert main(["bench", "--index", str(c0_file), "--patterns", str(empty)]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == [rows[0]]
    assert main(["bench", "--index", str(tmp_path / "missing"), "--patterns", str(pats)]) == EXIT_IO


def test_module_entry_point(c0_file):
    proc = subprocess.run([sys.executable, "-m", "topkdoc", "query", "--index", str(c0_file),
                           "--pattern", "ab", "--k", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "1\td0.txt\t2\n"
