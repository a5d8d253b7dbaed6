import numpy as np
import pytest

from gravfield.physics.types import (AgentPose, ArenaBounds, MagnetParams,
                                     ParamError, RopeParams, SpringParams,
                                     quat_identity, updated_params, vec)


def test_pose_validates_quaternion_norm():
    good = AgentPose(0, vec(0, 1, 0), quat_identity())
    assert good.validate() is good
    with pytest.raises(ParamError):
        AgentPose(0, vec(0, 1, 0), np.array([0.0, 0.0, 0.0, 1.2])).validate()


def test_pose_rejects_bad_agent_and_nonfinite():
    with pytest.raises(ParamError):
        AgentPose(4, vec(0, 1, 0), quat_identity()).validate()
    with pytest.raises(ParamError):
        AgentPose(0, vec(np.nan, 1, 0), quat_identity()).validate()


@pytest.mark.parametrize("field,bad", [
    ("mass_total", 0.0), ("mass_total", 11.0),
    ("elasticity", -0.1), ("elasticity", 1.5),
    ("natural_length", 0.5), ("natural_length", 7.0),
    ("width", 0.001), ("node_count", 2), ("node_count", 300),
])
def test_rope_params_ranges(field, bad):
    with pytest.raises(ParamError):
        RopeParams(**{field: bad}).validate()


def test_rope_params_defaults_valid():
    p = RopeParams().validate()
    assert (p.mass_total, p.elasticity, p.natural_length) == (1.0, 0.5, 3.0)
    assert p.node_count == 17


def test_spring_params_defaults_valid():
    p = SpringParams().validate()
    assert (p.stiffness_k, p.rest_length) == (2.0, 1.0)


def test_magnet_params_monopole_count_and_range():
    with pytest.raises(ParamError):
        MagnetParams(monopoles=(1.0, 1.0)).validate()
    with pytest.raises(ParamError):
        MagnetParams(monopoles=(4.0, 0.0, 0.0, 0.0)).validate()
    assert MagnetParams().validate().particle_count == 500


def test_updated_params_returns_new_validated_copy():
    before = RopeParams()
    after = updated_params(before, "mass_total", 2.5)
    assert after.mass_total == 2.5
    assert before.mass_total == 1.0            # original untouched


def test_updated_params_rejects_unknown_and_out_of_range():
    p = RopeParams()
    with pytest.raises(ParamError):
        updated_params(p, "springiness", 1.0)
    with pytest.raises(ParamError):
        updated_params(p, "mass_total", 50.0)
    with pytest.raises(ParamError):
        updated_params(p, "node_count", 16.5)
    with pytest.raises(ParamError):
        updated_params(MagnetParams(), "monopoles", (0, 0, 0, 0))


def test_updated_params_coerces_integral_counts():
    p = updated_params(RopeParams(), "node_count", 33.0)
    assert p.node_count == 33 and isinstance(p.node_count, int)


def test_arena_contains_and_sample():
    arena = ArenaBounds().validate()
    pts = np.array([[0.0, 1.0, 0.0], [5.0, 1.0, 0.0], [0.0, -0.1, 0.0]])
    assert list(arena.contains(pts)) == [True, False, False]
    rng = np.random.Generator(np.random.PCG64(1))
    sampled = arena.sample(rng, 64)
    assert sampled.shape == (64, 3)
    assert arena.contains(sampled).all()


def test_arena_rejects_inverted_extents():
    with pytest.raises(ParamError):
        ArenaBounds(min_corner=vec(1, 0, 0), max_corner=vec(-1, 3, 8)).validate()
