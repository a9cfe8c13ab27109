import numpy as np
import pytest

import fringecal as fc
from fringecal import (
    RadialModel,
    checkerboard_scene,
    four_step_phase,
    fringe_scene,
    generate_template_set,
    grid_scene,
    ground_truth_delta_r,
    ground_truth_profile,
    model_forward,
    model_inverse,
    render_distorted,
    render_template_set,
)

import oracles
from conftest import DIMS, F0, LAM


def test_division_forward_matches_rational_oracle():
    lens = RadialModel.division(5e-7)
    got = float(model_forward(lens, 360.0))
    ref = float(oracles.division_forward_reference(5e-7, 360.0))
    assert got == pytest.approx(ref, abs=1e-9)


def test_polynomial_forward_closed_form():
    model = RadialModel.polynomial(-3e-7, 2e-13)
    r = 250.0
    expected = r * (1.0 + -3e-7 * r**2 + 2e-13 * r**4)
    assert float(model_forward(model, r)) == pytest.approx(expected, rel=1e-12)


def test_identity_inverse_is_exact():
    r = np.linspace(0.0, 600.0, 1201)
    ident = RadialModel.identity()
    assert np.array_equal(model_inverse(ident, r), r)
    div0 = RadialModel.division(0.0)
    assert np.array_equal(model_inverse(div0, r), r)


def test_forward_inverse_round_trip_random_monotone_models():
    rng = np.random.default_rng(2)
    r = np.linspace(0.0, 550.0, 301)
    for _ in range(20):
        if rng.integers(0, 2) == 0:
            model = RadialModel.division(rng.uniform(-4e-7, 9e-7))
        else:
            model = RadialModel.polynomial(rng.uniform(-4e-7, 4e-7),
                                           rng.uniform(-1e-13, 1e-13))
        back = model_inverse(model, model_forward(model, r))
        assert np.abs(back - r).max() < 1e-9


def test_division_inverse_rejects_unreachable_radius():
    lens = RadialModel.division(5e-7)
    # beyond the fold of the forward map no captured radius exists
    with pytest.raises(fc.ParameterError):
        model_inverse(lens, 1102.0)


def test_negative_radius_rejected():
    lens = RadialModel.division(1e-7)
    with pytest.raises(fc.ParameterError):
        model_forward(lens, np.array([-1.0]))
    with pytest.raises(fc.ParameterError):
        model_inverse(lens, np.array([-1.0]))


def test_folding_polynomial_rejected_at_construction():
    with pytest.raises(fc.ParameterError):
        RadialModel.polynomial(-1e-5)


def test_folding_model_rejected_at_render_time():
    # skip the construction check, then let the frame check catch it
    model = RadialModel.polynomial(-1e-5, r_check=0.0)
    with pytest.raises(fc.NumericError):
        render_distorted(fringe_scene(0.0625), model, (512, 512))


def test_model_validation():
    with pytest.raises(fc.ParameterError):
        RadialModel("exponential", (0.1,))
    with pytest.raises(fc.ParameterError):
        RadialModel("division", (0.1, 0.2))
    with pytest.raises(fc.ParameterError):
        RadialModel("polynomial", (np.nan, 0.0))


def test_ground_truth_delta_r_zero_at_center():
    lens = RadialModel.division(5e-7)
    assert float(ground_truth_delta_r(lens, 0.0)) == 0.0


def test_ground_truth_delta_r_small_radius_cubic_growth():
    lam = 5e-7
    lens = RadialModel.division(lam)
    # leading-order displacement of the division model is lam * r^3
    got = float(ground_truth_delta_r(lens, 50.0))
    assert got == pytest.approx(lam * 50.0**3, rel=0.01)


def test_ground_truth_profile_tracks_exact_curve(lens):
    profile = ground_truth_profile(lens, DIMS, F0)
    r = np.arange(profile.r_max + 1, dtype=np.float64)
    dev = np.abs(profile.delta_r(r) - ground_truth_delta_r(lens, r))
    assert dev.max() < 0.5
    assert profile.f0 == F0
    assert profile.dims == DIMS


def test_identity_render_equals_templates_bitwise():
    frames = render_template_set(RadialModel.identity(), (512, 512), f0=0.0625)
    templates = generate_template_set(512, 512, 0.0625)
    for rendered, template in zip(frames, templates):
        assert np.array_equal(rendered, template.data)


def test_barrel_pulls_periphery_inward(lens):
    # captured radius is smaller than undistorted: fringes compress
    # toward the edges, so the captured pattern at a peripheral column
    # shows the scene from farther out
    r = np.array([100.0, 200.0, 300.0])
    assert np.all(model_forward(lens, r) < r)
    assert np.all(ground_truth_delta_r(lens, r) > 0.0)


def test_grid_rulings_bow_as_geometry_predicts(lens):
    img = render_distorted(grid_scene(spacing=64, line_width=5.0), lens, (512, 512))
    # captured trajectory of the undistorted vertical ruling x_u = 192
    y_u = np.linspace(0.0, 512.0, 4097)
    r_u = np.hypot(192.0 - 256.0, y_u - 256.0)
    scale = model_forward(lens, r_u) / r_u
    x_curve = 256.0 + scale * (192.0 - 256.0)
    y_curve = 256.0 + scale * (y_u - 256.0)
    order = np.argsort(y_curve)
    for y_probe in (96, 160, 224, 300, 420):
        x_pred = float(np.interp(y_probe, y_curve[order], x_curve[order]))
        center = int(round(x_pred))
        xs = np.arange(center - 8, center + 9)
        weight = 255.0 - img[y_probe, xs[0]:xs[-1] + 1]
        x_meas = float((weight * xs).sum() / weight.sum())
        # rulings render with hard edges, so the centroid carries up to
        # half a pixel of quantization
        assert abs(x_meas - x_pred) < 0.6


def test_vignette_scales_corner_by_stated_factor():
    flat = lambda x, y: np.full(np.broadcast(x, y).shape, 200.0)
    img = render_distorted(flat, RadialModel.identity(), (512, 512),
                           vignette_strength=0.25)
    assert img[256, 256] == pytest.approx(200.0, abs=1e-12)
    # pixel (0, 0) sits exactly at half-diagonal distance
    assert img[0, 0] == pytest.approx(150.0, abs=1e-9)


def test_vignette_leaves_phase_untouched():
    ident = RadialModel.identity()
    clean = render_template_set(ident, (512, 512), f0=0.0625)
    shaded = render_template_set(ident, (512, 512), f0=0.0625, vignette_strength=0.5)
    p_clean = four_step_phase(*clean, row=256)
    p_shaded = four_step_phase(*shaded, row=256)
    np.testing.assert_allclose(p_shaded.values, p_clean.values, atol=1e-12)


def test_noise_is_seed_deterministic(lens):
    a = render_template_set(lens, (128, 128), f0=0.0625, noise_sigma=2.0, seed=42)
    b = render_template_set(lens, (128, 128), f0=0.0625, noise_sigma=2.0, seed=42)
    c = render_template_set(lens, (128, 128), f0=0.0625, noise_sigma=2.0, seed=43)
    for fa, fb in zip(a, b):
        assert np.array_equal(fa, fb)
    assert not np.array_equal(a[0], c[0])


def test_noise_frames_differ_within_a_set(lens):
    frames = render_template_set(lens, (128, 128), f0=0.0625, noise_sigma=2.0, seed=1)
    clean = render_template_set(lens, (128, 128), f0=0.0625)
    noise0 = frames[0] - clean[0]
    noise1 = frames[1] - clean[1]
    assert not np.array_equal(noise0, noise1)
    assert noise0.std() == pytest.approx(2.0, rel=0.05)


def test_render_parameter_validation(lens):
    scene = fringe_scene(0.0625)
    with pytest.raises(fc.ParameterError):
        render_distorted(scene, lens, (0, 512))
    with pytest.raises(fc.ParameterError):
        render_distorted(scene, lens, (64, 64), noise_sigma=-1.0)
    with pytest.raises(fc.ParameterError):
        render_distorted(scene, lens, (64, 64), vignette_strength=1.5)


def test_custom_distortion_center():
    lens = RadialModel.division(5e-7, center=(100.0, 100.0))
    scene = checkerboard_scene(64, softness=1.0)
    img = render_distorted(scene, lens, (256, 256))
    # at the distortion center the capture equals the scene exactly
    assert img[100, 100] == pytest.approx(float(scene(100.0, 100.0)), abs=1e-12)


def test_fringe_scene_freq_scale_matches_scaled_carrier():
    near = fringe_scene(0.03125, freq_scale=2.0)
    direct = fringe_scene(0.0625)
    x = np.linspace(0.0, 511.0, 257)
    np.testing.assert_allclose(near(x, 0.0), direct(x, 0.0), atol=1e-12)


def test_fringe_scene_validation():
    with pytest.raises(fc.ParameterError):
        fringe_scene(0.0)
    with pytest.raises(fc.ParameterError):
        fringe_scene(0.0625, freq_scale=0.0)
    with pytest.raises(fc.ParameterError):
        fringe_scene(0.0625, shift_index=4)


def test_checkerboard_scene_hard_and_soft():
    hard = checkerboard_scene(64, softness=0.0)
    assert float(hard(32.0, 32.0)) == 255.0
    assert float(hard(96.0, 32.0)) == 0.0
    assert float(hard(0.0, 32.0)) == 127.5  # exact boundary sits mid-level
    soft = checkerboard_scene(64, softness=1.0)
    assert float(soft(32.0, 32.0)) == pytest.approx(255.0, abs=1e-6)
    assert float(soft(0.0, 32.0)) == pytest.approx(127.5, abs=1e-9)
    # one pixel into the cell the soft edge is already mostly resolved
    assert float(soft(1.0, 32.0)) > 200.0


def test_scene_validation():
    with pytest.raises(fc.ParameterError):
        checkerboard_scene(0)
    with pytest.raises(fc.ParameterError):
        checkerboard_scene(64, softness=-1.0)
    with pytest.raises(fc.ParameterError):
        grid_scene(spacing=1)
    with pytest.raises(fc.ParameterError):
        grid_scene(spacing=64, line_width=64.0)
