import json
from pathlib import Path

import pytest

from flownet.cli import main


def write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def events_file(tmp_path):
    return write(
        tmp_path / "events.csv",
        "origin,destination,year,count\n"
        "AA,BB,2014,2\n"
        "BB,AA,2014,2\n"
        "BB,CC,2014,1\n"
        "CC,AA,2014,3\n"
        "AA,CC,2015,4\n"
        "CC,AA,2015,4\n",
    )


def tree(out_dir: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(out_dir)): p.read_bytes()
        for p in sorted(out_dir.rglob("*"))
        if p.is_file()
    }


class TestIngest:
    def test_canonicalizes_event_file(self, tmp_path):
        src = write(
            tmp_path / "raw.csv",
            "origin,destination,year,count\nus,gb,2014,1\nUS,GB,2014,2\nUS,US,2014,9\n",
        )
        out = tmp_path / "canon.csv"
        assert main(["ingest", "--input", str(src), "--output", str(out)]) == 0
        assert out.read_text() == "origin,destination,year,count\nUS,GB,2014,3\n"

    def test_idempotent_on_canonical_file(self, tmp_path):
        src = write(tmp_path / "canon.csv", "origin,destination,year,count\nIT,GB,2012,1\n")
        out = tmp_path / "again.csv"
        assert main(["ingest", "--input", str(src), "--output", str(out)]) == 0
        assert out.read_bytes() == src.read_bytes()

    def test_affiliations_derive_moves(self, tmp_path, capsys):
        src = write(
            tmp_path / "aff.csv",
            "researcher_id,country,start_year,end_year\n"
            "r1,IT,2008,2010\n"
            "r1,GB,2010,2013\n"
            "r1,US,2013,\n"
            "r2,IT,2009,2010\n"
            "r2,GB,2010,\n",
        )
        out = tmp_path / "events.csv"
        assert main(["ingest", "--input", str(src), "--output", str(out)]) == 0
        assert out.read_text() == (
            "origin,destination,year,count\nIT,GB,2010,2\nGB,US,2013,1\n"
        )
        assert "inferred moves: 2" in capsys.readouterr().out

    def test_strict_mode_fails_on_bad_rows(self, tmp_path):
        src = write(tmp_path / "raw.csv", "origin,destination,year,count\nUS,US,2014,1\n")
        out = tmp_path / "out.csv"
        assert main(["ingest", "--input", str(src), "--output", str(out), "--strict"]) != 0

    def test_unknown_header_fails(self, tmp_path):
        src = write(tmp_path / "raw.csv", "a,b,c\n1,2,3\n")
        assert main(["ingest", "--input", str(src)]) == 2


class TestMetrics:
    def test_fixture_scores_match_module_examples(self, tmp_path):
        src = write(
            tmp_path / "two.csv",
            "origin,destination,year,count\nAA,BB,2014,1\nBB,AA,2014,1\n",
        )
        out = tmp_path / "out"
        assert main(
            ["metrics", "--input", str(src), "--out-dir", str(out), "--years", "2014"]
        ) == 0
        doc = json.loads((out / "scores.json").read_text())
        assert doc["scores"]["pagerank"]["2014"] == {"AA": 0.5, "BB": 0.5}
        assert doc["scores"]["hub"]["2014"]["AA"] == pytest.approx(0.5)
        assert doc["scores"]["drain_index"]["2014"]["AA"] == 0.0
        assert (out / "choropleth_pagerank_2014.csv").exists()
        assert (out / "ranking_drain_index_2014.csv").exists()

    def test_metric_selection(self, events_file, tmp_path):
        out = tmp_path / "out"
        assert main(
            [
                "metrics",
                "--input", str(events_file),
                "--out-dir", str(out),
                "--years", "2014..2015",
                "--metrics", "hits,pagerank",
            ]
        ) == 0
        doc = json.loads((out / "scores.json").read_text())
        assert sorted(doc["scores"]) == ["authority", "hub", "pagerank"]
        assert not (out / "choropleth_drain_index_2014.csv").exists()

    def test_unknown_metric_rejected(self, events_file, tmp_path):
        assert main(
            [
                "metrics",
                "--input", str(events_file),
                "--out-dir", str(tmp_path / "x"),
                "--metrics", "katz",
            ]
        ) == 2

    def test_byte_identical_reruns(self, events_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main(
                [
                    "metrics",
                    "--input", str(events_file),
                    "--out-dir", str(out),
                    "--years", "2014..2015",
                ]
            ) == 0
        assert tree(out1) == tree(out2)

    def test_missing_input(self, tmp_path):
        assert main(["metrics", "--input", str(tmp_path / "nope.csv")]) == 2

    def test_empty_year_artifacts_present(self, events_file, tmp_path):
        # 2016 has no events; artifacts must exist but be empty, for both
        # roster modes
        for roster in ("global", "per-year"):
            out = tmp_path / roster
            assert main(
                [
                    "metrics",
                    "--input", str(events_file),
                    "--out-dir", str(out),
                    "--years", "2014..2016",
                    "--roster", roster,
                ]
            ) == 0
            choropleth = (out / "choropleth_pagerank_2016.csv").read_text()
            if roster == "per-year":
                assert choropleth == "country,value\n"
            else:
                assert len(choropleth.splitlines()) > 1


class TestNull:
    def test_reproducible_document(self, events_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main(
                [
                    "null",
                    "--input", str(events_file),
                    "--out-dir", str(out),
                    "--years", "2014..2015",
                    "--seed", "7",
                    "--ensemble-size", "4",
                ]
            ) == 0
        assert (out1 / "null_stats.json").read_bytes() == (out2 / "null_stats.json").read_bytes()

    def test_forced_year_null_equals_real(self, tmp_path):
        src = write(
            tmp_path / "one.csv",
            "origin,destination,year,count\nAA,BB,2014,1\n",
        )
        out = tmp_path / "out"
        assert main(
            [
                "null",
                "--input", str(src),
                "--out-dir", str(out),
                "--years", "2014",
                "--seed", "3",
            ]
        ) == 0
        doc = json.loads((out / "null_stats.json").read_text())
        real = doc["curves"]["gini_hub"]["real"]
        null = doc["curves"]["gini_hub"]["null"]
        assert real["mean"] == null["mean"]

    def test_seed_changes_document(self, events_file, tmp_path):
        outputs = []
        for seed in ("1", "2"):
            out = tmp_path / seed
            assert main(
                [
                    "null",
                    "--input", str(events_file),
                    "--out-dir", str(out),
                    "--years", "2014..2015",
                    "--seed", seed,
                ]
            ) == 0
            outputs.append((out / "null_stats.json").read_bytes())
        assert outputs[0] != outputs[1]


class TestReport:
    def test_bundle_manifest_covers_all_files(self, events_file, tmp_path):
        out = tmp_path / "bundle"
        assert main(
            [
                "report",
                "--input", str(events_file),
                "--out-dir", str(out),
                "--years", "2014..2015",
                "--seed", "5",
                "--ensemble-size", "3",
            ]
        ) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        on_disk = {name for name in tree(out) if name != "manifest.json"}
        assert set(manifest["files"]) == on_disk
        for required in (
            "scores.json",
            "null_stats.json",
            "threshold_sensitivity.json",
            "lorenz_classes.json",
            "reciprocity.json",
            "trajectories.json",
        ):
            assert required in manifest["files"]

    def test_single_year_restriction(self, events_file, tmp_path):
        out = tmp_path / "bundle"
        assert main(
            [
                "report",
                "--input", str(events_file),
                "--out-dir", str(out),
                "--years", "2014",
                "--seed", "5",
                "--ensemble-size", "2",
            ]
        ) == 0
        years_in_names = {
            name.rsplit("_", 1)[1].split(".")[0]
            for name in tree(out)
            if name.startswith("choropleth_")
        }
        assert years_in_names == {"2014"}


class TestEgo:
    def test_both_directions_one_year(self, events_file, tmp_path):
        out = tmp_path / "ego"
        assert main(
            [
                "ego",
                "--input", str(events_file),
                "--out-dir", str(out),
                "--years", "2014",
                "--country", "aa",
            ]
        ) == 0
        names = set(tree(out))
        assert names == {"ego_AA_2014_in.dot", "ego_AA_2014_out.dot"}

    def test_panel_set_like_the_case_study(self, events_file, tmp_path):
        out = tmp_path / "ego"
        assert main(
            [
                "ego",
                "--input", str(events_file),
                "--out-dir", str(out),
                "--years", "2012,2013,2014,2015",
                "--country", "AA",
                "--direction", "both",
            ]
        ) == 0
        assert len(tree(out)) == 8

    def test_unknown_country_fails(self, events_file, tmp_path):
        assert main(
            [
                "ego",
                "--input", str(events_file),
                "--out-dir", str(tmp_path / "x"),
                "--country", "ZZ",
            ]
        ) == 2
