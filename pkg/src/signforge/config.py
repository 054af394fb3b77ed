"""Toolchain configuration.

Settings come from (lowest to highest precedence): built-in defaults, a
flat ``signforge.toml``-style file (path from ``--config`` or the
``SIGNFORGE_CONFIG`` environment variable), then command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import SchemaViolation
from .kinematics import IkOptions, MirrorMap
from .lexicon import (
    CompileOptions,
    HandConfig,
    KeepOutRegion,
    load_hand_config,
    load_keepout,
    load_mirror_map,
)
from .resources import data_path
from .robot_model import KinematicChain, build_chain, parse_urdf

CONFIG_ENV_VAR = "SIGNFORGE_CONFIG"
DEFAULT_PORT = 7465


@dataclass(frozen=True)
class CliConfig:
    urdf: str | None = None  # default: bundled both-arms model
    base_link: str = "Torso"
    tip_link: str = "RHand"
    left_tip_link: str | None = "LHand"
    lexicon_dir: str | None = None  # default: bundled demo lexicon
    mirror_map: str | None = None
    keepout: str | None = None
    hand_map: str | None = None
    fps: int = 25
    strict: bool = False
    tol_pos: float = 1e-3
    tol_ori: float = 1e-2
    max_iterations: int = 300
    max_restarts: int = 16
    transition_frames: int = 10
    lead_in_frames: int = 12
    lead_out_frames: int = 12
    port: int = DEFAULT_PORT


_FIELD_TYPES = {f.name: f.type for f in fields(CliConfig)}


def load_config(path: str | None = None, overrides: dict | None = None) -> CliConfig:
    """Resolve configuration from file plus overrides (None values ignored)."""
    config = CliConfig()
    chosen = path or os.environ.get(CONFIG_ENV_VAR)
    if chosen:
        try:
            with open(chosen, "rb") as handle:
                data = tomllib.load(handle)
        except OSError as exc:
            raise SchemaViolation(str(chosen), f"cannot read config: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise SchemaViolation(str(chosen), f"invalid config: {exc}") from exc
        unknown = set(data) - set(_FIELD_TYPES)
        if unknown:
            raise SchemaViolation(str(chosen), f"unknown config keys: {sorted(unknown)}")
        config = replace(config, **data)
    if overrides:
        applicable = {k: v for k, v in overrides.items() if v is not None}
        config = replace(config, **applicable)
    return config


@dataclass(frozen=True)
class Toolchain:
    """Everything the subcommands need, built once from a CliConfig."""

    config: CliConfig
    chain: KinematicChain
    left_chain: KinematicChain | None
    mirror_map: MirrorMap
    keepout: KeepOutRegion
    hand: HandConfig

    @property
    def ik_options(self) -> IkOptions:
        c = self.config
        return IkOptions(
            tol_pos=c.tol_pos,
            tol_ori=c.tol_ori,
            max_iterations=c.max_iterations,
            max_restarts=c.max_restarts,
        )

    @property
    def compile_options(self) -> CompileOptions:
        c = self.config
        return CompileOptions(
            fps=c.fps,
            ik=self.ik_options,
            hand=self.hand,
            strict=c.strict,
            keepout=self.keepout,
        )

    @property
    def lexicon_dir(self) -> Path:
        if self.config.lexicon_dir:
            return Path(self.config.lexicon_dir)
        return data_path("demo_lexicon")


def build_toolchain(config: CliConfig) -> Toolchain:
    urdf_path = Path(config.urdf) if config.urdf else data_path("pepper_both_arms.urdf")
    model = parse_urdf(urdf_path.read_text(encoding="utf-8"))
    chain = build_chain(model, config.base_link, config.tip_link)

    left_chain = None
    if config.left_tip_link:
        try:
            left_chain = build_chain(model, config.base_link, config.left_tip_link)
        except Exception:
            left_chain = None  # single-arm models have no left tip

    mirror_path = Path(config.mirror_map) if config.mirror_map else data_path("mirror_map.json")
    keepout_path = Path(config.keepout) if config.keepout else data_path("keepout.json")
    hand_path = Path(config.hand_map) if config.hand_map else data_path("hand_map.json")

    return Toolchain(
        config=config,
        chain=chain,
        left_chain=left_chain,
        mirror_map=load_mirror_map(mirror_path.read_text(encoding="utf-8")),
        keepout=load_keepout(keepout_path.read_text(encoding="utf-8")),
        hand=load_hand_config(hand_path.read_text(encoding="utf-8")),
    )
