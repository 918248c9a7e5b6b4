import pytest

from taxisim import ConfigError, load_config, parse_config

MINIMAL = """
grid.nx = 64
model.l = 2
model.epsilon = 0.01
time.T = 1
init.preset = constant
"""


class TestMinimal:
    def test_defaults_filled(self):
        cfg = parse_config(MINIMAL)
        assert cfg.dim == 1
        assert cfg.lengths == (1.0,)
        assert cfg.shape == (64,)
        assert cfg.model.l == 2.0
        assert cfg.model.epsilon == 0.01
        assert cfg.model.b == 1.0
        assert cfg.model.face_mean == "arithmetic"
        assert cfg.T == 1.0
        assert cfg.safety == 0.4
        assert cfg.scheme == "explicit"
        assert cfg.preset == "constant"
        assert cfg.preset_params == {"a": 1.0, "b": 1.0}
        assert cfg.p_list == (2.0, 4.0)
        assert cfg.q_alpha == ((4.0, 3.0), (6.0, 5.0))
        assert cfg.sample_interval == pytest.approx(0.01)
        assert cfg.seed == 0

    def test_grid_and_control_builders(self):
        cfg = parse_config(MINIMAL)
        g = cfg.grid()
        assert g.shape == (64,) and g.domain.lengths == (1.0,)
        ctrl = cfg.step_control()
        assert ctrl.safety == 0.4 and ctrl.scheme == "explicit"

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config("# header\n\n" + MINIMAL + "\nseed = 3 # trailing\n")
        assert cfg.seed == 3


class TestValidation:
    def test_small_l_names_key(self):
        bad = MINIMAL.replace("model.l = 2", "model.l = 0.5")
        with pytest.raises(ConfigError, match="model.l"):
            parse_config(bad)

    def test_unknown_key_hard_error(self):
        with pytest.raises(ConfigError, match="model.alpha"):
            parse_config(MINIMAL + "model.alpha = 1\n")

    def test_unknown_preset_param_hard_error(self):
        # amplitude belongs to gaussian_colony, not constant
        with pytest.raises(ConfigError, match="init.amplitude"):
            parse_config(MINIMAL + "init.amplitude = 2\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config(MINIMAL + "model.l = 3\n")

    def test_parse_error_reports_line(self):
        text = "grid.nx = 64\nmodel.l two\n"
        with pytest.raises(ConfigError, match="line 2"):
            parse_config(text)

    def test_unparsable_value_reports_line(self):
        bad = MINIMAL.replace("grid.nx = 64", "grid.nx = many")
        with pytest.raises(ConfigError, match="grid.nx"):
            parse_config(bad)

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="time.T"):
            parse_config(MINIMAL.replace("time.T = 1", ""))

    def test_bad_epsilon(self):
        bad = MINIMAL.replace("model.epsilon = 0.01", "model.epsilon = 1.5")
        with pytest.raises(ConfigError, match="model.epsilon"):
            parse_config(bad)

    def test_bad_scheme(self):
        with pytest.raises(ConfigError, match="time.scheme"):
            parse_config(MINIMAL + "time.scheme = fully_implicit\n")

    def test_unknown_preset(self):
        bad = MINIMAL.replace("init.preset = constant",
                              "init.preset = vortex")
        with pytest.raises(ConfigError, match="vortex"):
            parse_config(bad)

    def test_bad_q_alpha(self):
        with pytest.raises(ConfigError, match="q_alpha"):
            parse_config(MINIMAL + "diagnostics.q_alpha = 2:1\n")

    def test_noise_amp_bound(self):
        text = MINIMAL.replace("init.preset = constant",
                               "init.preset = perturbed_front")
        with pytest.raises(ConfigError, match="noise_amp"):
            parse_config(text + "init.noise_amp = 2\ninit.base = 1\n")


class TestRicherConfigs:
    def test_2d_with_preset_params(self):
        text = """
domain.dim = 2
domain.lx = 2
domain.ly = 3
grid.nx = 16
grid.ny = 8
model.l = 2.5
model.epsilon = 0.05
model.face_mean = harmonic
time.T = 0.5
time.scheme = semi_implicit_v
init.preset = gaussian_colony
init.amplitude = 4
init.width = 0.2
init.center = 1.0,1.5
diagnostics.p_list = 2,3,4
diagnostics.q_alpha = 4:3
output.snapshot_times = 0,0.5
output.images = on
seed = 42
"""
        cfg = parse_config(text)
        assert cfg.lengths == (2.0, 3.0) and cfg.shape == (16, 8)
        assert cfg.model.face_mean == "harmonic"
        assert cfg.scheme == "semi_implicit_v"
        assert cfg.preset_params["center"] == (1.0, 1.5)
        assert cfg.p_list == (2.0, 3.0, 4.0)
        assert cfg.q_alpha == ((4.0, 3.0),)
        assert cfg.snapshot_times == (0.0, 0.5)
        assert cfg.images is True
        assert cfg.seed == 42

    def test_center_dim_mismatch(self):
        text = MINIMAL.replace("init.preset = constant",
                               "init.preset = gaussian_colony")
        with pytest.raises(ConfigError, match="center"):
            parse_config(text + "init.center = 0.5,0.5\n")

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(MINIMAL)
        cfg = load_config(path)
        assert cfg.shape == (64,)

    def test_load_config_error_names_file(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(MINIMAL + "model.alpha = 1\n")
        with pytest.raises(ConfigError, match="bad.cfg"):
            load_config(path)
