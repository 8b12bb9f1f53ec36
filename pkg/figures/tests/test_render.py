import hashlib
import os
from pathlib import Path

import pytest

from figure_scripts import PlotSpec, group_rows, load_rows, render
from figure_scripts.cli import main

GOLDEN_CSV = str(Path(__file__).parent / "data" / "golden.csv")

# sha256 of each golden render, recorded once from a verified run; any
# change to the pinned rendering path shows up here
GOLDEN_HASHES = {
    "fig_p0.05_readers.png": "ac5827ef2f0811dda200c6cfbbd40db8254269ba8d21d5b3cfe84a9991445bd0",
    "fig_p0.05_retweeters.png": "eea1f0ec69ffb3f9c3731ef0915233c30e69b54d6aee3ae6aeb9a3fa777f1e1f",
    "fig_p0.2_readers.png": "5270071157aa390614b1e02d858902e3967cf4b0b6b99ff957c632a9667b8fd3",
    "fig_p0.2_retweeters.png": "ef28850aff57d3e495a5724c78d3c5d8b16255d492ed7b0ceb8295bc6b1a613a",
}

HEADER = "strategy,p,metric,K,mean,stderr,ci_low,ci_high,includes_seed_set,elapsed_ms"


def write_csv(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestRender:
    def test_one_image_per_group(self, tmp_path):
        before = Path(GOLDEN_CSV).read_bytes()
        out = tmp_path / "figs"
        written = render(PlotSpec(csv_path=GOLDEN_CSV, out_dir=str(out)))
        assert len(written) == 4  # two p values x two metrics
        names = sorted(os.path.basename(p) for p in written)
        assert names == [
            "fig_p0.05_readers.png",
            "fig_p0.05_retweeters.png",
            "fig_p0.2_readers.png",
            "fig_p0.2_retweeters.png",
        ]
        for p in written:
            assert os.path.getsize(p) > 0
        assert Path(GOLDEN_CSV).read_bytes() == before  # input never mutated

    def test_single_strategy_three_points(self, tmp_path):
        csv_path = write_csv(tmp_path / "one.csv", [
            HEADER,
            "greedy,0.1,retweeters,1,2.0,0.1,1.8,2.2,true,5",
            "greedy,0.1,retweeters,2,3.0,0.1,2.8,3.2,true,5",
            "greedy,0.1,retweeters,5,4.0,0.1,3.8,4.2,true,5",
        ])
        spec = PlotSpec(csv_path=csv_path, out_dir=str(tmp_path / "figs"))
        groups = group_rows(load_rows(spec), spec)
        assert list(groups) == [("0.1", "retweeters")]
        series = groups[("0.1", "retweeters")]
        assert list(series) == ["greedy"]  # one series
        assert [pt[0] for pt in series["greedy"]] == [1, 2, 5]  # three markers
        written = render(spec)
        assert len(written) == 1
        assert os.path.basename(written[0]) == "fig_p0.1_retweeters.png"

    def test_empty_body_is_an_error_and_writes_nothing(self, tmp_path):
        csv_path = write_csv(tmp_path / "empty.csv", [HEADER])
        out = tmp_path / "figs"
        with pytest.raises(ValueError, match="no plottable data rows"):
            render(PlotSpec(csv_path=csv_path, out_dir=str(out)))
        assert not out.exists()

    def test_missing_columns_are_all_listed(self, tmp_path):
        csv_path = write_csv(tmp_path / "bad.csv", [
            "strategy,p,metric,K,mean,stderr,includes_seed_set,elapsed_ms",
            "greedy,0.1,retweeters,1,2.0,0.1,true,5",
        ])
        with pytest.raises(ValueError) as err:
            load_rows(PlotSpec(csv_path=csv_path, out_dir=str(tmp_path)))
        assert "ci_high" in str(err.value) and "ci_low" in str(err.value)

    def test_rows_not_counting_the_seed_set_are_skipped(self, tmp_path):
        csv_path = write_csv(tmp_path / "mixed.csv", [
            HEADER,
            "greedy,0.1,retweeters,1,2.0,0.1,1.8,2.2,true,5",
            "greedy,0.1,retweeters,1,1.0,0.1,0.8,1.2,false,5",
        ])
        rows = load_rows(PlotSpec(csv_path=csv_path, out_dir=str(tmp_path)))
        assert len(rows) == 1 and rows[0]["mean"] == 2.0

    def test_golden_images_are_stable(self, tmp_path):
        first = render(PlotSpec(csv_path=GOLDEN_CSV, out_dir=str(tmp_path / "a")))
        second = render(PlotSpec(csv_path=GOLDEN_CSV, out_dir=str(tmp_path / "b")))
        for pa, pb in zip(first, second):
            assert Path(pa).read_bytes() == Path(pb).read_bytes()
        for path in first:
            digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
            assert digest == GOLDEN_HASHES[os.path.basename(path)], path


class TestCli:
    def test_render_success(self, tmp_path, capsys):
        out = tmp_path / "figs"
        code = main(["render", "--csv", GOLDEN_CSV, "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out.strip().split("\n")
        assert len(printed) == 4
        for line in printed:
            assert os.path.isfile(line)

    def test_logy_flag(self, tmp_path):
        out = tmp_path / "figs"
        code = main(["render", "--csv", GOLDEN_CSV, "--out", str(out), "--logy"])
        assert code == 0
        assert len(list(out.glob("*.png"))) == 4

    def test_bad_csv_exits_nonzero_with_listing(self, tmp_path, capsys):
        csv_path = write_csv(tmp_path / "bad.csv", [
            "strategy,p,metric,K,mean,stderr,includes_seed_set,elapsed_ms",
        ])
        code = main(["render", "--csv", csv_path, "--out", str(tmp_path / "figs")])
        assert code == 1
        err = capsys.readouterr().err
        assert "ci_low" in err and "ci_high" in err
        assert not (tmp_path / "figs").exists()

    def test_missing_file_exits_nonzero(self, tmp_path, capsys):
        code = main(["render", "--csv", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "figs")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["paint"])
        assert exc.value.code == 2
