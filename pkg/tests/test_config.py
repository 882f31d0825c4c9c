import pytest

from pftrack.config import ConfigError, TrackerConfig, format_config, load_config, parse_config_text


def test_defaults():
    cfg = TrackerConfig()
    assert (cfg.alpha, cfg.fg_threshold, cfg.min_area, cfg.particles) == (0.01, 30.0, 50, 100)
    assert (cfg.arma_a, cfg.arma_b, cfg.arma_c) == (2.0, -1.0, 1.0)
    assert (cfg.sigma_x, cfg.sigma_y, cfg.sigma_scale) == (1.0, 0.5, 0.02)
    assert (cfg.noise_increment, cfg.likelihood_threshold, cfg.gate_factor, cfg.max_occluded_frames) == (1.0, 0.6, 1.5, 30)
    assert cfg.histogram.nbins == 110


def test_parse_overrides_and_comments():
    cfg = parse_config_text("# tuned\nparticles = 20\nlikelihood_threshold=0.5  # looser\n\n")
    assert cfg.particles == 20 and cfg.likelihood_threshold == 0.5


def test_unknown_key_lists_valid_keys():
    with pytest.raises(ConfigError) as info:
        parse_config_text("partcles = 3")
    assert "partcles" in str(info.value) and "particles" in str(info.value)


@pytest.mark.parametrize("text", ["particles = many", "particles", "particles = 0", "alpha = 2", "n_h = 0"])
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_round_trip(tmp_path):
    cfg = TrackerConfig(particles=33, seed=9, sigma_x=1.25)
    path = tmp_path / "c.cfg"
    path.write_text(format_config(cfg))
    assert load_config(path) == cfg
