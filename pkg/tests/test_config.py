"""Tests for the flat dotted-key configuration."""

import pytest

from cssr.config import OUTPUT_ENV, SimulationConfig, parse_config, parse_text
from cssr.errors import ConfigurationError


@pytest.fixture(autouse=True)
def _no_env(monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)


def write(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return p


class TestParseConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        cfg = parse_config(write(tmp_path, ""))
        assert cfg == SimulationConfig()
        assert cfg.grid.n_x == 256 and cfg.grid.l_x == 12.0 and cfg.grid.m_y == 64
        assert cfg.time.dt == 2.5e-4 and cfg.time.snapshot_stride == 0.01

    def test_values_and_comments(self, tmp_path):
        cfg = parse_config(write(tmp_path, """
            # physics
            physics.beta = 2        # inline comment
            physics.epsilon = 0.1
            flow.seed_profile = noisy-gaussian
            output.write_fields = true
            sweep.epsilons = [0.4, 0.2, 0.1]
        """))
        assert cfg.physics.beta == 2.0 and isinstance(cfg.physics.beta, float)
        assert cfg.physics.epsilon == 0.1
        assert cfg.flow.seed_profile == "noisy-gaussian"
        assert cfg.output.write_fields is True
        assert cfg.sweep.epsilons == [0.4, 0.2, 0.1]

    def test_negative_epsilon_names_key(self, tmp_path):
        with pytest.raises(ConfigurationError, match="physics.epsilon") as exc:
            parse_config(write(tmp_path, "physics.epsilon = -1"))
        assert exc.value.key == "physics.epsilon"

    @pytest.mark.parametrize("line,key", [
        ("grid.n_x = 100", "grid.n_x"),
        ("grid.n_x = 1.5", "grid.n_x"),
        ("sweep.epsilons = [0.1, 0.2]", "sweep.epsilons"),
        ("time.dt = 0", "time.dt"),
        ("flow.seed_profile = random", "flow.seed_profile"),
        ("output.write_fields = 3", "output.write_fields"),
        ("physics.beta = abc", "physics.beta"),
    ])
    def test_invalid_values(self, tmp_path, line, key):
        with pytest.raises(ConfigurationError) as exc:
            parse_config(write(tmp_path, line))
        assert exc.value.key == key

    def test_unknown_key_warns(self, tmp_path):
        with pytest.warns(UserWarning, match="physics.gamma"):
            cfg = parse_config(write(tmp_path, "physics.gamma = 3"))
        assert cfg == SimulationConfig()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            parse_config(tmp_path / "nope.cfg")

    def test_malformed_line(self):
        with pytest.raises(ConfigurationError, match="line 1"):
            parse_text("physics.beta 2")

    def test_env_overrides_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "elsewhere"))
        cfg = parse_config(write(tmp_path, "output.dir = here"))
        assert cfg.output.dir == str(tmp_path / "elsewhere")

    def test_overrides_beat_file(self, tmp_path):
        cfg = parse_config(write(tmp_path, "physics.beta = 2"), {"physics.beta": 0.5})
        assert cfg.physics.beta == 0.5

    def test_flat_echo(self):
        d = SimulationConfig().to_dict()
        assert d["physics.epsilon"] == 0.25
        assert d["sweep.epsilons"] == [0.4, 0.2, 0.1, 0.05]
        assert all("." in k for k in d)
