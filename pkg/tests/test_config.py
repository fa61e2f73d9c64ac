import pytest

from modehunt.config import ConfigError, PipelineConfig, load_config


def write_config(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text, encoding="utf-8")
    return path


class TestDefaults:
    def test_empty_file_gives_documented_defaults(self, tmp_path):
        cfg = load_config(write_config(tmp_path, ""))
        assert cfg.iterations == 1000
        assert cfg.subset_size == 3
        assert cfg.threshold == 0.01
        assert cfg.permutations == 199
        assert cfg.variables is None
        assert cfg.grid_points == 30
        assert (cfg.grid_lo, cfg.grid_hi) == (0.2, 3.0)
        assert cfg.index == "fowlkes_mallows"
        assert cfg.alpha == 0.001
        assert cfg.replicates == 1000
        assert cfg.h_b is None and cfg.h_test is None
        assert cfg.seed == 0
        assert cfg.out == "out"
        assert cfg.test_fraction == 0.5

    def test_to_dict_covers_every_field(self):
        cfg = PipelineConfig()
        payload = cfg.to_dict()
        assert payload["iterations"] == 1000
        assert "signal_mean" in payload and payload["signal_mean"] == [4.0, 4.0]


class TestParsing:
    def test_full_file(self, tmp_path):
        cfg = load_config(write_config(tmp_path, """
[data]
background = bg.csv
experimental = ex.csv
label_column = truth
test_fraction = 0.4

[varselect]
iterations = 500
subset_size = 2
threshold = 0.05
permutations = 299
variables = 3, 0, 7

[bandwidth]
h_b = 0.45
grid_points = 12
grid_lo = 0.5
grid_hi = 2.0
index = jaccard

[modetest]
alpha = 0.01
replicates = 400
h = 0.3

[run]
seed = 42
out = results

[synth]
n_background = 100
n_experimental = 120
dimension = 3
signal_fraction = 0.2
signal_mean = 1.0, 2.0, 3.0
signal_sd = 0.7
"""))
        assert cfg.background == "bg.csv" and cfg.experimental == "ex.csv"
        assert cfg.label_column == "truth"
        assert cfg.test_fraction == 0.4
        assert cfg.iterations == 500 and cfg.subset_size == 2
        assert cfg.variables == [3, 0, 7]
        assert cfg.h_b == 0.45 and cfg.h_test == 0.3
        assert cfg.index == "jaccard"
        assert cfg.alpha == 0.01 and cfg.replicates == 400
        assert cfg.seed == 42 and cfg.out == "results"
        assert cfg.dimension == 3 and cfg.signal_mean == [1.0, 2.0, 3.0]

    def test_unknown_section_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"unknown section \[extra\]"):
            load_config(write_config(tmp_path, "[extra]\nfoo = 1\n"))

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown key 'bananas'"):
            load_config(write_config(tmp_path, "[run]\nbananas = 1\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.ini")

    def test_malformed_file(self, tmp_path):
        with pytest.raises(ConfigError, match="malformed"):
            load_config(write_config(tmp_path, "no section header\n"))


class TestRangeChecks:
    @pytest.mark.parametrize(
        "section,key,value,message",
        [
            ("varselect", "iterations", "0", ">= 1"),
            ("varselect", "iterations", "ten", "expected an integer"),
            ("varselect", "threshold", "0", "strictly between 0 and 1"),
            ("varselect", "threshold", "1.2", "strictly between 0 and 1"),
            ("varselect", "permutations", "50", ">= 99"),
            ("varselect", "variables", "1, 1", "duplicate"),
            ("varselect", "variables", "-2", "0-based"),
            ("varselect", "variables", "a,b", "comma-separated integers"),
            ("bandwidth", "h_b", "-0.5", "positive"),
            ("bandwidth", "h_b", "nan", "finite"),
            ("bandwidth", "grid_points", "1", ">= 2"),
            ("bandwidth", "index", "cosine", "unknown index"),
            ("modetest", "alpha", "0", "strictly between"),
            ("modetest", "replicates", "100", ">= 200"),
            ("run", "seed", "-1", ">= 0"),
            ("run", "out", "", "empty value"),
            ("data", "test_fraction", "1.0", "strictly between"),
            ("synth", "signal_sd", "0", "positive"),
        ],
    )
    def test_rejects_bad_value(self, tmp_path, section, key, value, message):
        text = f"[{section}]\n{key} = {value}\n"
        with pytest.raises(ConfigError, match=message):
            load_config(write_config(tmp_path, text))

    def test_error_names_file_section_and_key(self, tmp_path):
        path = write_config(tmp_path, "[modetest]\nalpha = 2\n")
        with pytest.raises(ConfigError, match=r"run\.ini \[modetest\] alpha"):
            load_config(path)


class TestCrossValidation:
    def test_grid_bounds_ordered(self, tmp_path):
        text = "[bandwidth]\ngrid_lo = 2.0\ngrid_hi = 1.0\n"
        with pytest.raises(ConfigError, match="grid_lo must be below"):
            load_config(write_config(tmp_path, text))

    def test_signal_fraction_range(self, tmp_path):
        text = "[synth]\nsignal_fraction = 1.0\n"
        with pytest.raises(ConfigError, match=r"signal_fraction must lie in \[0, 1\)"):
            load_config(write_config(tmp_path, text))

    def test_signal_mean_length_matches_dimension(self, tmp_path):
        text = "[synth]\ndimension = 3\n"
        with pytest.raises(ConfigError, match="signal_mean has 2 entries"):
            load_config(write_config(tmp_path, text))

    def test_zero_signal_fraction_allowed(self, tmp_path):
        cfg = load_config(write_config(tmp_path, "[synth]\nsignal_fraction = 0\n"))
        assert cfg.signal_fraction == 0.0
