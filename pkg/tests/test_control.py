import json

import pytest

from gravfield.mapping import (RemoveMapping, SetMapping, SetMonopole,
                               SetParam, SwitchMode)
from gravfield.osc import OscMessage
from gravfield.server.control import (AudioInput, ControlError,
                                      event_error_reply, handle_json_control,
                                      handle_osc_control)


def test_mode_codes_translate():
    assert handle_osc_control(OscMessage("/gravfield/mode", (1,))) == SwitchMode("rope")
    assert handle_osc_control(OscMessage("/gravfield/mode", (2,))) == SwitchMode("spring")
    assert handle_osc_control(OscMessage("/gravfield/mode", (3,))) == SwitchMode("magnetic")


def test_mode_code_out_of_range():
    with pytest.raises(ControlError) as err:
        handle_osc_control(OscMessage("/gravfield/mode", (4,)))
    assert err.value.reason == "range"


def test_rope_mass_translates():
    event = handle_osc_control(OscMessage("/gravfield/rope/mass", (2.5,)))
    assert event == SetParam("rope", "mass_total", 2.5)


def test_rope_addresses():
    assert handle_osc_control(
        OscMessage("/gravfield/rope/width", (0.1,))) == SetParam("rope", "width", 0.1)
    assert handle_osc_control(
        OscMessage("/gravfield/rope/elasticity", (0.9,))) == SetParam(
            "rope", "elasticity", 0.9)


@pytest.mark.parametrize("leaf,param", [
    ("wavelength", "wavelength"), ("shake_speed", "shake_speed"),
    ("shake_strength", "shake_strength"), ("wave_width", "wave_width"),
    ("rotation_speed", "rotation_speed"), ("offset", "offset"),
    ("stiffness", "stiffness_k"), ("rest_length", "rest_length"),
])
def test_spring_addresses(leaf, param):
    event = handle_osc_control(OscMessage(f"/gravfield/spring/{leaf}", (1.25,)))
    assert event == SetParam("spring", param, 1.25)


def test_monopole_address():
    event = handle_osc_control(OscMessage("/gravfield/magnet/1/strength", (-2.0,)))
    assert event == SetMonopole(1, -2.0)
    with pytest.raises(ControlError):
        handle_osc_control(OscMessage("/gravfield/magnet/one/strength", (1.0,)))


def test_audio_env_address_and_range():
    assert handle_osc_control(
        OscMessage("/gravfield/audio/env", (0.6,))) == AudioInput(0.6)
    with pytest.raises(ControlError) as err:
        handle_osc_control(OscMessage("/gravfield/audio/env", (1.5,)))
    assert err.value.reason == "range"


def test_mapping_set_address_parses_spec_json():
    spec_json = json.dumps({"mapping_id": "m", "source": "rope.v",
                            "chain": [], "target_address": "/synth/amp"})
    event = handle_osc_control(OscMessage("/gravfield/mapping/set", (spec_json,)))
    assert isinstance(event, SetMapping)
    assert event.spec.mapping_id == "m"
    with pytest.raises(ControlError) as err:
        handle_osc_control(OscMessage("/gravfield/mapping/set", ("{not json",)))
    assert err.value.reason == "mapping"


def test_unknown_address_rejected():
    for addr in ("/gravfield/rope/sparkle", "/other/mode", "/gravfield"):
        with pytest.raises(ControlError) as err:
            handle_osc_control(OscMessage(addr, (1.0,)))
        assert err.value.reason == "address"


def test_arity_and_type_errors():
    with pytest.raises(ControlError) as err:
        handle_osc_control(OscMessage("/gravfield/rope/mass", (1.0, 2.0)))
    assert err.value.reason == "arity"
    with pytest.raises(ControlError) as err:
        handle_osc_control(OscMessage("/gravfield/rope/mass", ("heavy",)))
    assert err.value.reason == "type"
    with pytest.raises(ControlError):
        handle_osc_control(OscMessage("/gravfield/mode", (1.0,)))


def test_int_promotes_to_float_param():
    event = handle_osc_control(OscMessage("/gravfield/rope/mass", (2,)))
    assert event == SetParam("rope", "mass_total", 2.0)


def test_json_set_param():
    event = handle_json_control(json.dumps(
        {"set_param": {"object": "rope", "param": "mass_total", "value": 2.5}}))
    assert event == SetParam("rope", "mass_total", 2.5)


def test_json_switch_mode_and_monopole():
    assert handle_json_control('{"switch_mode": "spring"}') == SwitchMode("spring")
    assert handle_json_control(
        '{"set_monopole": {"agent": 1, "value": -2}}') == SetMonopole(1, -2)


def test_json_mapping_commands():
    spec = {"mapping_id": "m", "source": "rope.v", "chain": [],
            "target_address": "/synth/amp"}
    event = handle_json_control(json.dumps({"set_mapping": spec}))
    assert isinstance(event, SetMapping)
    event = handle_json_control('{"remove_mapping": {"mapping_id": "m"}}')
    assert event == RemoveMapping("m")


def test_json_audio_env():
    assert handle_json_control('{"audio_env": 0.4}') == AudioInput(0.4)
    with pytest.raises(ControlError):
        handle_json_control('{"audio_env": 1.4}')


def test_json_malformed_frames():
    for text in ("not json", "[1,2]", "{}",
                 '{"set_param": 1}', '{"a": 1, "b": 2}',
                 '{"set_monopole": {"agent": 1}}', '{"warp": 9}'):
        with pytest.raises(ControlError):
            handle_json_control(text)


def test_error_reply_shapes():
    reply = event_error_reply(ControlError("range", "mode code 9 outside 1..3"))
    assert reply == {"error": {"reason": "range",
                               "detail": "mode code 9 outside 1..3"}}
    from gravfield.physics.types import ParamError
    reply = event_error_reply(ParamError("rope.mass_total=50.0 outside [0.1, 10.0]"))
    assert reply["error"]["reason"] == "rejected"
    assert "50.0" in reply["error"]["detail"]
    assert event_error_reply(RuntimeError("boom"))["error"]["reason"] == "internal"
