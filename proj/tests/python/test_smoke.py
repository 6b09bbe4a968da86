"""Smoke tests for the pyrelay extension module."""

import math

import numpy as np
import pytest

import pyrelay


def two_segment_schedule():
    return pyrelay.validate_schedule(12, [("A", 0, 5), ("B", 6, 11)])


def test_schedule_validation_and_geometry():
    schedule = two_segment_schedule()
    assert schedule.video_frames == 12
    assert [s.prompt_id for s in schedule.segments] == ["A", "B"]
    assert schedule.segments[0].midpoint == 2.5
    assert schedule.segments[0].half_length == 2.5
    assert schedule.segments[1].midpoint == 8.5
    assert schedule.segment_for_frame(7).prompt_id == "B"

    with pytest.raises(pyrelay.RelayError, match="overlap at frame 6"):
        pyrelay.validate_schedule(12, [("A", 0, 6), ("B", 6, 11)])


def test_schedule_from_json_rejects_unknown_fields():
    text = '{"video_frames": 4, "fps": 30, "segments": [{"prompt": "A", "start": 0, "end": 3}]}'
    with pytest.raises(pyrelay.RelayError, match="fps"):
        pyrelay.schedule_from_json(text)


def test_sigma_and_decay_curve():
    sigma = pyrelay.sigma_for(2.5, 0.5, 0.1)
    assert abs(sigma - 0.9319812035693122) < 1e-12

    offsets = np.array([-2.5, 0.0, 0.5, 2.5])
    fractions = pyrelay.decay_curve(2.5, 0.5, 0.1, offsets)
    assert fractions[1] == 1.0
    assert fractions[2] == 1.0
    assert abs(fractions[0] - 0.1) < 1e-12
    assert abs(fractions[3] - 0.1) < 1e-12


def test_penalty_matrix_and_occupancy_routing():
    schedule = two_segment_schedule()
    layout = pyrelay.build_token_layout(
        schedule, tokens_per_frame=1, tokens_per_prompt=4
    )
    penalty = pyrelay.build_penalty_matrix(schedule, layout)
    assert penalty.shape == (12, 8)
    assert abs(penalty[0, 0] - math.log(10.0)) < 1e-12

    trace = pyrelay.occupancy(schedule, layout)
    mass = trace.mass
    assert trace.prompts == ["A", "B"]
    assert np.allclose(mass.sum(axis=1), 1.0, atol=1e-9)
    # Interior frames keep their own prompt on top.
    assert mass[2, 0] > mass[2, 1]
    assert mass[9, 1] > mass[9, 0]

    report = pyrelay.boundary_report(trace, schedule)
    hard_trace = pyrelay.occupancy(schedule, layout, mode="hard")
    hard_report = pyrelay.boundary_report(hard_trace, schedule)
    assert hard_report.max_step == 2.0
    assert report.max_step < hard_report.max_step
    assert report.mode == "soft"


def test_attention_routes_match():
    rng = np.random.default_rng(0)
    query = rng.standard_normal((6, 3))
    key = rng.standard_normal((5, 3))
    value = rng.standard_normal((5, 2))
    penalty = np.abs(rng.standard_normal((6, 5)))

    out_a, weights_a = pyrelay.penalized_attention(query, key, value, penalty)
    out_b, weights_b = pyrelay.prior_multiplier_oracle(query, key, value, penalty)
    assert np.max(np.abs(weights_a - weights_b)) < 1e-9
    assert np.max(np.abs(out_a - out_b)) < 1e-9

    # A zero penalty reduces to the baseline operator.
    base_out, base_weights = pyrelay.attention(query, key, value)
    red_out, red_weights = pyrelay.penalized_attention(
        query, key, value, np.zeros((6, 5))
    )
    assert np.array_equal(base_weights, red_weights)
    assert np.array_equal(base_out, red_out)


def test_occupancy_determinism():
    schedule = two_segment_schedule()
    layout = pyrelay.build_token_layout(schedule, 2, 4)
    a = pyrelay.occupancy(schedule, layout, profile="random", seed=11)
    b = pyrelay.occupancy(schedule, layout, profile="random", seed=11)
    assert np.array_equal(a.mass, b.mass)
