from __future__ import annotations

import pytest

from signforge.kinematics import MirrorMap
from signforge.lexicon import HandConfig, KeepOutRegion, load_keepout, load_mirror_map
from signforge.resources import data_path, data_text
from signforge.robot_model import build_chain, parse_urdf


@pytest.fixture(scope="session")
def right_arm_model():
    return parse_urdf(data_text("pepper_right_arm.urdf"))


@pytest.fixture(scope="session")
def both_arms_model():
    return parse_urdf(data_text("pepper_both_arms.urdf"))


@pytest.fixture(scope="session")
def chain(right_arm_model):
    return build_chain(right_arm_model, "Torso", "RHand")


@pytest.fixture(scope="session")
def right_chain_two_arm(both_arms_model):
    return build_chain(both_arms_model, "Torso", "RHand")


@pytest.fixture(scope="session")
def left_chain(both_arms_model):
    return build_chain(both_arms_model, "Torso", "LHand")


@pytest.fixture(scope="session")
def mirror_map() -> MirrorMap:
    return load_mirror_map(data_text("mirror_map.json"))


@pytest.fixture(scope="session")
def keepout() -> KeepOutRegion:
    return load_keepout(data_text("keepout.json"))


@pytest.fixture(scope="session")
def hand_config() -> HandConfig:
    return HandConfig()


@pytest.fixture(scope="session")
def demo_lexicon_dir():
    return data_path("demo_lexicon")


@pytest.fixture(scope="session")
def sentences_dir():
    return data_path("sentences")
