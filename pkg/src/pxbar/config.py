"""Experiment configuration: TOML file + ``--set`` overrides, resolved into model objects."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .crossbar import CrossbarArray
from .device import DeviceParams
from .errors import ConfigError
from .materials import MaterialRecord, builtin_material_path, load_material
from .optics import WaveguideCellGeometry

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

REQUIRED_SECTIONS = ("material", "device", "geometry", "array")


def default_config_path() -> Path:
    return Path(str(resources.files("pxbar") / "data" / "default.toml"))


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def parse_override(item: str) -> tuple[list[str], object]:
    """``"geometry.gamma=0.2"`` -> (["geometry", "gamma"], 0.2). Bare words stay strings."""
    key, sep, raw = item.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override {item!r} is not of the form section.key=value")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return [k.strip() for k in key.split(".")], value


@dataclass
class ExperimentConfig:
    raw: dict
    source: Path
    material: MaterialRecord
    device: DeviceParams
    geometry: WaveguideCellGeometry
    seed: int
    out_dir: Path
    digest: str

    def section(self, name: str) -> dict:
        return dict(self.raw.get(name, {}))

    def make_array(self, rows: int | None = None, cols: int | None = None) -> CrossbarArray:
        arr = self.raw["array"]
        read = self.raw.get("read", {})
        return CrossbarArray(
            rows=int(rows if rows is not None else arr["rows"]),
            cols=int(cols if cols is not None else arr["cols"]),
            device_params=self.device,
            geom=self.geometry,
            material=self.material,
            r_row=float(arr.get("r_row_ohm", 0.0)),
            r_col=float(arr.get("r_col_ohm", 0.0)),
            t_read=float(read.get("t_read_s", 10e-9)),
        )


def load_config(
    path: str | Path | None = None,
    overrides: list[str] | None = None,
    seed: int | None = None,
    out: str | Path | None = None,
) -> ExperimentConfig:
    """Load a TOML config (the bundled default when ``path`` is None).

    Precedence: explicit ``seed``/``out`` > ``--set`` overrides > file > defaults.
    """
    source = Path(path) if path is not None else default_config_path()
    try:
        text = source.read_text()
    except OSError as exc:
        raise ConfigError(f"{source}: cannot read config ({exc})") from exc
    try:
        user = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    raw = _merge(tomllib.loads(default_config_path().read_text()), user)
    for item in overrides or []:
        keys, value = parse_override(item)
        node = raw
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r}: {k} is not a section")
        node[keys[-1]] = value
    if seed is not None:
        raw["seed"] = seed
    if out is not None:
        raw["out"] = str(out)
    return resolve(raw, source)


def _material_path(ref: str, source: Path) -> Path:
    if ref.startswith("builtin:"):
        return builtin_material_path(ref.split(":", 1)[1])
    p = Path(ref)
    return p if p.is_absolute() else source.parent / p


def resolve(raw: dict, source: Path) -> ExperimentConfig:
    for name in REQUIRED_SECTIONS:
        if not isinstance(raw.get(name), dict):
            raise ConfigError(f"{source}: missing [{name}] section")

    mat_block = raw["material"]
    if "path" not in mat_block:
        raise ConfigError(f"{source}: [material] path is required")
    try:
        mat_path = _material_path(str(mat_block["path"]), source)
        material = load_material(
            mat_path,
            mat_block.get("g_amorphous_S"),
            mat_block.get("g_crystalline_S"),
            mat_block.get("name"),
        )
    except Exception as exc:
        raise ConfigError(f"{source}: [material] {exc}") from exc

    dev_block = dict(raw["device"])
    if dev_block.get("technology", "PCM") == "PCM":
        dev_block.setdefault("g_a_S", material.g_amorphous)
        dev_block.setdefault("g_c_S", material.g_crystalline)
    try:
        device = DeviceParams.from_config(dev_block)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: [device] {exc}") from exc

    try:
        geometry = WaveguideCellGeometry.from_config(raw["geometry"])
    except KeyError as exc:
        raise ConfigError(f"{source}: [geometry] missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: [geometry] {exc}") from exc

    arr = raw["array"]
    try:
        if int(arr["rows"]) < 1 or int(arr["cols"]) < 1:
            raise ValueError("rows and cols must be positive")
        if float(arr.get("r_row_ohm", 0)) < 0 or float(arr.get("r_col_ohm", 0)) < 0:
            raise ValueError("wire resistances must be >= 0")
    except KeyError as exc:
        raise ConfigError(f"{source}: [array] missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: [array] {exc}") from exc

    v_read = float(raw.get("read", {}).get("v_read", 0.2))
    if not (0 < v_read < min(device.v_set, device.v_reset)):
        raise ConfigError(
            f"{source}: [read] v_read={v_read} must be > 0 and below the set/reset thresholds"
        )

    try:
        seed = int(raw.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: seed must be an integer") from exc

    # the output location is not part of the experiment identity
    hashed = {k: v for k, v in raw.items() if k != "out"}
    digest_input = {"config": hashed, "material_sha256": hashlib.sha256(mat_path.read_bytes()).hexdigest()}
    digest = hashlib.sha256(json.dumps(digest_input, sort_keys=True, default=str).encode()).hexdigest()
    return ExperimentConfig(
        raw=raw,
        source=source,
        material=material,
        device=device,
        geometry=geometry,
        seed=seed,
        out_dir=Path(raw.get("out", "pxbar-out")),
        digest=digest,
    )
