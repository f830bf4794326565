import io
import json

import pytest

from licalloc.cases import REQUEST_AT, all_lossy_licenses, case_studies
from licalloc.cli import main, parse_time
from licalloc.corpus import CorpusDocument, serialize_corpus
from licalloc.model import Action, Request


@pytest.fixture
def deadline_path(tmp_path, deadline_case):
    doc = CorpusDocument(deadline_case.licenses, [deadline_case.request])
    path = tmp_path / "deadline.json"
    path.write_bytes(serialize_corpus(doc))
    return str(path)


@pytest.fixture
def script_path(tmp_path, deadline_case):
    doc = CorpusDocument(
        deadline_case.licenses,
        [
            Request(Action.PLAY, "song-a", at=REQUEST_AT),
            Request(Action.PLAY, "song-b", at=REQUEST_AT),
        ],
    )
    path = tmp_path / "script.json"
    path.write_bytes(serialize_corpus(doc))
    return str(path)


@pytest.fixture
def all_lossy_path(tmp_path):
    doc = CorpusDocument(all_lossy_licenses())
    path = tmp_path / "lossy.json"
    path.write_bytes(serialize_corpus(doc))
    return str(path)


class TestLabel:
    def test_prelabeled_file_round_trips_byte_identically(self, deadline_path, capsys):
        assert main(["label", deadline_path]) == 0
        first = capsys.readouterr().out
        assert main(["label", deadline_path]) == 0
        assert capsys.readouterr().out == first
        with open(deadline_path, "r", encoding="utf-8") as fh:
            assert first == fh.read()

    def test_malformed_file_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        assert main(["label", str(bad)]) == 1
        assert "error" in capsys.readouterr().err

    def test_missing_file_exits_1(self, capsys):
        assert main(["label", "/nonexistent/corpus.json"]) == 1

    def test_label_mismatch_exits_2_in_strict_mode(self, tmp_path, deadline_path, capsys):
        payload = json.load(open(deadline_path))
        payload["licenses"][0]["sublicenses"][0]["label"]["times"] = "many"
        tampered = tmp_path / "tampered.json"
        tampered.write_text(json.dumps(payload))
        assert main(["label", str(tampered)]) == 2
        capsys.readouterr()
        assert main(["label", str(tampered), "--no-strict-labels"]) == 0


class TestAllocate:
    def test_proposed_picks_counter_license(self, deadline_path, capsys):
        code = main(["allocate", deadline_path, "play", "song-a", "--time", str(REQUEST_AT)])
        assert code == 0
        assert "chosen: license-2" in capsys.readouterr().out

    def test_baseline_picks_dated_license(self, deadline_path, capsys):
        code = main(
            ["allocate", deadline_path, "play", "song-a", "--algorithm", "oma", "--time", str(REQUEST_AT)]
        )
        assert code == 0
        assert "chosen: license-1" in capsys.readouterr().out

    def test_unknown_content_exits_4(self, deadline_path, capsys):
        assert main(["allocate", deadline_path, "play", "song-z"]) == 4

    def test_prompt_non_interactive_exits_3(self, all_lossy_path, capsys):
        code = main(["allocate", all_lossy_path, "play", "song-a", "--time", str(REQUEST_AT)])
        assert code == 3
        out = capsys.readouterr().out
        assert "license-1" in out and "license-2" in out

    def test_prompt_interactive_reads_choice(self, all_lossy_path, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("2\n"))
        code = main(
            ["allocate", all_lossy_path, "play", "song-a", "--interactive", "--time", str(REQUEST_AT)]
        )
        assert code == 0
        assert "chosen: license-2" in capsys.readouterr().out

    def test_prompt_interactive_eof_exits_3(self, all_lossy_path, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO(""))
        code = main(
            ["allocate", all_lossy_path, "play", "song-a", "--interactive", "--time", str(REQUEST_AT)]
        )
        assert code == 3

    def test_json_output_parses_back(self, deadline_path, capsys):
        code = main(
            ["allocate", deadline_path, "play", "song-a", "--format", "json", "--time", str(REQUEST_AT)]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["decision"] == "chosen"
        assert payload["license"] == "license-2"
        assert {e["content"]: e["count"] for e in payload["rights_after"]}["song-b"] == 1


class TestSimulate:
    def test_filtered_run_satisfies_both_requests(self, script_path, capsys):
        assert main(["simulate", script_path]) == 0
        out = capsys.readouterr().out
        assert "license-2" in out and "license-1" in out

    def test_baseline_run_fails_second_request(self, script_path, capsys):
        assert main(["simulate", script_path, "--algorithm", "oma"]) == 4
        assert "not satisfiable" in capsys.readouterr().out

    def test_empty_request_script_prints_initial_rights(self, tmp_path, deadline_case, capsys):
        doc = CorpusDocument(deadline_case.licenses)
        path = tmp_path / "no-requests.json"
        path.write_bytes(serialize_corpus(doc))
        assert main(["simulate", str(path)]) == 0
        out = capsys.readouterr().out
        assert "initial rights" in out

    def test_transcript_is_deterministic(self, script_path, capsys):
        main(["simulate", script_path, "--format", "json"])
        first = capsys.readouterr().out
        main(["simulate", script_path, "--format", "json"])
        assert capsys.readouterr().out == first

    def test_prompt_steps_are_flagged(self, tmp_path, capsys):
        doc = CorpusDocument(
            all_lossy_licenses(), [Request(Action.PLAY, "song-a", at=REQUEST_AT)]
        )
        path = tmp_path / "lossy-script.json"
        path.write_bytes(serialize_corpus(doc))
        assert main(["simulate", str(path), "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["steps"][0]["resolved_by_default_chooser"] is True
        assert payload["steps"][0]["decision"]["via_prompt"] is True

    def test_time_override_applies_to_all_requests(self, script_path, capsys):
        assert main(["simulate", script_path, "--time", "1735600123"]) == 0
        assert "@1735600123" in capsys.readouterr().out


class TestVerify:
    def test_filtered_campaign_exits_0(self, capsys):
        assert main(["verify", "--trials", "50", "--seed", "3"]) == 0

    def test_baseline_campaign_exits_5(self, capsys):
        assert main(["verify", "--trials", "400", "--seed", "3", "--algorithm", "oma"]) == 5

    def test_zero_trials_empty_report(self, capsys):
        assert main(["verify", "--trials", "0"]) == 0
        assert "0 passed" in capsys.readouterr().out

    def test_json_report_round_trips(self, capsys):
        assert main(["verify", "--trials", "30", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["failed"] is False
        assert payload["reports"][0]["seed"] == 0

    def test_seeded_reports_are_byte_identical(self, capsys):
        main(["verify", "--trials", "40", "--seed", "9", "--format", "json"])
        first = capsys.readouterr().out
        main(["verify", "--trials", "40", "--seed", "9", "--format", "json"])
        assert capsys.readouterr().out == first

    def test_dump_failures_writes_corpus_files(self, tmp_path, capsys):
        out_dir = tmp_path / "failures"
        code = main(
            [
                "verify",
                "--trials",
                "400",
                "--seed",
                "3",
                "--algorithm",
                "oma",
                "--dump-failures",
                str(out_dir),
            ]
        )
        assert code == 5
        dumped = list(out_dir.glob("ce-*.json"))
        assert dumped
        from licalloc.corpus import parse_corpus

        parse_corpus(dumped[0].read_bytes())

    def test_neutrality_and_liveness_checks(self, capsys):
        assert main(["verify", "--checks", "neutrality", "--trials", "100"]) == 0
        assert main(["verify", "--checks", "liveness", "--trials", "20"]) == 0

    def test_unknown_check_exits_1(self, capsys):
        assert main(["verify", "--checks", "vibes"]) == 1


class TestCases:
    def test_fresh_build_matches_all_cells(self, capsys):
        assert main(["cases"]) == 0
        assert "all cells match" in capsys.readouterr().out

    def test_json_output_stable(self, capsys):
        assert main(["cases", "--format", "json"]) == 0
        first = capsys.readouterr().out
        payload = json.loads(first)
        assert payload["all_match"] is True
        assert main(["cases", "--format", "json"]) == 0
        assert capsys.readouterr().out == first

    def test_tampered_fixture_exits_5(self, capsys, monkeypatch):
        import licalloc.cli as cli_module

        studies = list(case_studies())
        broken = studies[0]
        swapped = type(broken)(
            id=broken.id,
            title=broken.title,
            licenses=broken.licenses,
            request=broken.request,
            expected={"proposed": "license-1", "oma": "license-2"},
        )
        monkeypatch.setattr(
            cli_module.case_fixtures, "case_studies", lambda: tuple([swapped] + studies[1:])
        )
        assert main(["cases"]) == 5
        err = capsys.readouterr().err
        assert "deadline-vs-counter" in err

    def test_dump_corpora_round_trip(self, tmp_path, capsys):
        out = tmp_path / "corpora"
        assert main(["cases", "--dump-corpora", str(out)]) == 0
        files = sorted(f.name for f in out.glob("*.json"))
        assert "deadline-vs-counter.json" in files
        assert "all-lossy.json" in files
        from licalloc.corpus import parse_corpus

        for f in out.glob("*.json"):
            parse_corpus(f.read_bytes())


def test_parse_time_accepts_iso_and_int():
    assert parse_time("123") == 123
    assert parse_time("1970-01-01T00:02:03Z") == 123
    assert parse_time("1970-01-01T00:02:03+00:00") == 123
    with pytest.raises(Exception):
        parse_time("not-a-time")
