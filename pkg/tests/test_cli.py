import json
import os

import pytest

from followcast.cli import main
from followcast.graph import load_binary_cache, load_edgelist


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.txt"
    path.write_text("0 1\n1 2\n2 3\n")
    return str(path)


@pytest.fixture
def regular_file(tmp_path):
    n, k = 30, 4
    lines = [f"{i} {(i + j) % n}" for i in range(n) for j in range(1, k + 1)]
    path = tmp_path / "regular.txt"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


class TestStats:
    def test_chain(self, chain_file, capsys):
        assert main(["stats", "--graph", chain_file]) == 0
        out = capsys.readouterr().out
        assert "N=4" in out
        assert "E=3" in out
        assert "<k>=0.75" in out

    def test_missing_file_exits_1(self, tmp_path, capsys):
        code = main(["stats", "--graph", str(tmp_path / "nope.txt")])
        assert code == 1
        assert "error: service error 400" in capsys.readouterr().err

    def test_two_sources_rejected(self, chain_file, capsys):
        code = main(["stats", "--graph", chain_file, "--synthetic", "2.5,10,1,5"])
        assert code == 1
        assert "exactly one" in capsys.readouterr().err


class TestGenerate:
    def test_deterministic_edgelist(self, tmp_path, capsys):
        a, b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
        assert main(["generate", "--synthetic", "2.5,200,2,10", "--seed", "3",
                     "--out", a]) == 0
        assert main(["generate", "--synthetic", "2.5,200,2,10", "--seed", "3",
                     "--out", b]) == 0
        assert open(a).read() == open(b).read()
        assert "wrote 200 nodes" in capsys.readouterr().out

    def test_binary_output_matches_text(self, tmp_path):
        text, binary = str(tmp_path / "g.txt"), str(tmp_path / "g.bin")
        main(["generate", "--synthetic", "2.5,150,2,10", "--seed", "5", "--out", text])
        main(["generate", "--synthetic", "2.5,150,2,10", "--seed", "5", "--out", binary])
        assert load_edgelist(text).fingerprint() == load_binary_cache(binary).fingerprint()

    def test_malformed_spec_exits_1(self, tmp_path, capsys):
        code = main(["generate", "--synthetic", "2.5,200", "--out",
                     str(tmp_path / "x.txt")])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestPruneCache:
    def test_writes_sample_files(self, chain_file, tmp_path, capsys):
        out = str(tmp_path / "cache")
        code = main(["prune-cache", "--graph", chain_file, "--p", "0.5",
                     "--samples", "4", "--out", out])
        assert code == 0
        assert len([f for f in os.listdir(out) if f.endswith(".npz")]) == 4
        assert "cached 4 condensed samples" in capsys.readouterr().out


class TestSelect:
    def test_high_degree_picks_only(self, chain_file, capsys):
        code = main(["select", "--graph", chain_file, "--strategy", "high_degree",
                     "--k", "2"])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("picks: 0 1")
        assert "K_prefix" not in out  # no curve without p

    def test_curve_with_p(self, chain_file, capsys):
        code = main(["select", "--graph", chain_file, "--strategy", "greedy",
                     "--k", "2", "--p", "1.0", "--samples", "5"])
        assert code == 0
        out = capsys.readouterr().out
        assert "picks: 0" in out
        lines = [l for l in out.splitlines() if "," in l]
        assert lines[0] == "strategy,K_prefix,mean,stderr,ci_low,ci_high,picks"
        assert lines[1].startswith("greedy,1,4,")

    def test_curve_to_file(self, chain_file, tmp_path, capsys):
        out_path = str(tmp_path / "curve.csv")
        main(["select", "--graph", chain_file, "--strategy", "greedy", "--k", "2",
              "--p", "1.0", "--samples", "5", "--out", out_path])
        stdout = capsys.readouterr().out
        assert "picks:" in stdout
        assert "K_prefix" not in stdout
        content = open(out_path).read()
        assert content.startswith("strategy,K_prefix,")

    def test_dynamic_reports_attempts(self, regular_file, capsys):
        code = main(["select", "--graph", regular_file, "--strategy", "dynamic_greedy",
                     "--k", "3", "--p", "0.5", "--samples", "10",
                     "--recip", "const=0.5", "--seed", "2"])
        assert code == 0
        assert "attempts:" in capsys.readouterr().out

    def test_unknown_strategy_is_usage_error(self, chain_file):
        with pytest.raises(SystemExit) as exc:
            main(["select", "--graph", chain_file, "--strategy", "best", "--k", "1"])
        assert exc.value.code == 2


class TestEstimate:
    def test_deterministic_chain(self, chain_file, capsys):
        code = main(["estimate", "--graph", chain_file, "--p", "1.0",
                     "--samples", "10", "0"])
        assert code == 0
        out = capsys.readouterr().out
        assert "mean=4" in out
        assert "stderr=0" in out
        assert "n_samples=10" in out

    def test_auto_samples(self, chain_file, capsys):
        code = main(["estimate", "--graph", chain_file, "--p", "0.5", "0"])
        assert code == 0
        assert "n_samples=30" in capsys.readouterr().out  # auto floor

    def test_bad_node_exits_1(self, chain_file, capsys):
        code = main(["estimate", "--graph", chain_file, "--p", "0.5",
                     "--samples", "5", "99"])
        assert code == 1
        assert "error: service error 400" in capsys.readouterr().err

    def test_nodes_required(self, chain_file):
        with pytest.raises(SystemExit) as exc:
            main(["estimate", "--graph", chain_file, "--p", "0.5"])
        assert exc.value.code == 2


class TestAnalyze:
    def test_regular_graph(self, regular_file, capsys):
        code = main(["analyze", "--graph", regular_file, "--p", "0.1,0.3"])
        assert code == 0
        out = capsys.readouterr().out
        assert "p_c=0.25" in out
        assert "N=30 E=120" in out

    def test_csv_output(self, regular_file, tmp_path):
        out_path = str(tmp_path / "analysis.csv")
        main(["analyze", "--graph", regular_file, "--p", "0.2", "--out", out_path])
        lines = open(out_path).read().strip().splitlines()
        assert lines[0] == "p,mean_offspring,p_ext,recommended_n,auto_n,effective_density"
        fields = lines[1].split(",")
        assert fields[0] == "0.2"
        assert float(fields[1]) == pytest.approx(0.8, abs=1e-6)
        assert fields[2] == "1"  # subcritical


class TestExperiment:
    def test_config_file_run(self, chain_file, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"graph = {chain_file}\n"
            "p = 0.5\n"
            "k_max = 2\n"
            "k_grid = 1,2\n"
            "strategies = high_degree,random\n"
            "samples = 10\n"
            "seed = 4\n"
        )
        out_path = str(tmp_path / "result.csv")
        code = main(["experiment", "--config", str(cfg), "--out", out_path])
        assert code == 0
        lines = open(out_path).read().strip().splitlines()
        assert lines[0] == ("strategy,p,metric,K,mean,stderr,ci_low,ci_high,"
                            "includes_seed_set,elapsed_ms")
        assert len(lines) == 1 + 2 * 2 * 2
        manifest = json.loads(open(out_path + ".manifest.json").read())
        assert manifest["status"] == "complete"
        assert "wrote 8 rows" in capsys.readouterr().out

    def test_flags_override_config(self, chain_file, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"graph = {chain_file}\np = 0.5\nk_max = 2\nk_grid = 1\n"
            "strategies = high_degree\nsamples = 10\n"
        )
        out_path = str(tmp_path / "o.csv")
        code = main(["experiment", "--config", str(cfg), "--strategy",
                     "random", "--out", out_path])
        assert code == 0
        body = open(out_path).read()
        assert "random," in body
        assert "high_degree," not in body

    def test_flags_alone_suffice(self, chain_file, tmp_path):
        out_path = str(tmp_path / "flags.csv")
        code = main(["experiment", "--graph", chain_file, "--p", "0.5", "--k", "2",
                     "--k-grid", "1,2", "--strategy", "high_degree",
                     "--samples", "5", "--out", out_path])
        assert code == 0
        assert os.path.exists(out_path)
        assert os.path.exists(out_path + ".manifest.json")

    def test_unknown_config_key_exits_1(self, chain_file, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(f"graph = {chain_file}\nbudget = 10\n")
        code = main(["experiment", "--config", str(cfg)])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_partial_run_exits_1(self, chain_file, tmp_path, capsys, monkeypatch):
        import followcast.experiment as exp

        def boom(graph, K, seed):
            raise RuntimeError("synthetic failure")

        monkeypatch.setattr(exp, "random_select", boom)
        out_path = str(tmp_path / "partial.csv")
        code = main(["experiment", "--graph", chain_file, "--p", "0.5", "--k", "2",
                     "--k-grid", "1", "--strategy", "high_degree,random",
                     "--samples", "5", "--out", out_path])
        assert code == 1
        assert "experiment incomplete" in capsys.readouterr().err
        manifest = json.loads(open(out_path + ".manifest.json").read())
        assert manifest["status"] == "partial"


class TestUsage:
    def test_no_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_console_entry_point_installed(self):
        import importlib.metadata as md

        scripts = md.entry_points(group="console_scripts")
        names = {ep.name for ep in scripts}
        assert "followcast" in names
