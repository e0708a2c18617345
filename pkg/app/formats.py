"""
File formats
Plane datasets (T3, SLC, H/A/alpha), PGM label masks, PPM class maps, model text files,
pipeline configuration and scene metadata
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from dotenv import dotenv_values
from pydantic import ValidationError

from app.core_types import CoherencyRaster, HermitianMatrix3, SlcRaster, hermitian_eig_batch
from app.decomposition import NODATA, HaaRaster
from app.errors import ConfigError, FormatError, describe_validation_error
from app.models import Kernel, PipelineConfig, Rectangle, SceneClass, SceneSpec
from app.svm import BinaryMachine, FeatureScaler, SvmModel
from app.wishart import ClassMap, LabelMask, WishartModel

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

HEADER_FILE = "header.txt"
PLANE_DTYPE = np.dtype("<f4")
T3_PLANES = ("T11", "T22", "T33", "T12_real", "T12_imag", "T13_real", "T13_imag", "T23_real", "T23_imag")
SLC_PLANES = ("HH_real", "HH_imag", "HV_real", "HV_imag", "VV_real", "VV_imag")
HAA_PLANES = ("entropy", "anisotropy", "alpha")
# float32 planes round rank-deficient matrices to slightly negative eigenvalues
STORED_PSD_TOLERANCE = 1e-5

PALETTE_FIXED = {
    0: (0, 0, 0),
    1: (200, 30, 30),
    2: (30, 160, 30),
    3: (30, 60, 200),
}
PALETTE_CYCLE = (
    (230, 160, 30), (150, 60, 190), (40, 180, 180), (200, 90, 140),
    (120, 120, 40), (90, 90, 90), (240, 220, 80), (20, 100, 60),
    (170, 110, 60), (100, 150, 230), (230, 120, 100), (210, 210, 210),
)

# repr-exact decimal for float64
NUMBER_FORMAT = "{:.17g}"


# ---------------------------------------------------------------------------
# Plane datasets
# ---------------------------------------------------------------------------

def write_header(directory: PathLike, fields: Dict[str, Any]) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [f"{key} = {value}" for key, value in fields.items()]
    (directory / HEADER_FILE).write_text("\n".join(lines) + "\n")


def read_header(directory: PathLike) -> Dict[str, str]:
    """key = value lines; the FormatError offset is the 1-based line number"""
    path = Path(directory) / HEADER_FILE
    if not path.is_file():
        raise FormatError(path, 0, "dataset header not found")
    fields = {}
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(path, number, f"expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        fields[key] = value
    for key in ("kind", "width", "height"):
        if key not in fields:
            raise FormatError(path, 0, f"missing header key '{key}'")
    if fields.get("byte_order", "little") != "little" or fields.get("dtype", "float32") != "float32":
        raise FormatError(path, 0, "only little-endian float32 planes are supported")
    return fields


def _positive_int(fields: Dict[str, str], key: str, path: Path) -> int:
    try:
        value = int(fields[key])
    except (KeyError, ValueError):
        raise FormatError(path, 0, f"header key '{key}' must be an integer")
    if value < 1:
        raise FormatError(path, 0, f"header key '{key}' must be positive, got {value}")
    return value


def _write_planes(directory: Path, planes: Dict[str, np.ndarray]) -> None:
    for name, plane in planes.items():
        np.ascontiguousarray(plane, dtype=PLANE_DTYPE).tofile(directory / f"{name}.bin")


def _read_plane(path: Path, width: int, height: int) -> np.ndarray:
    expected = PLANE_DTYPE.itemsize * width * height
    if not path.is_file():
        raise FormatError(path, 0, "plane file not found")
    size = path.stat().st_size
    if size != expected:
        raise FormatError(path, min(size, expected), f"plane holds {size} bytes, expected {expected}")
    plane = np.fromfile(path, dtype=PLANE_DTYPE).reshape(height, width)
    bad = ~np.isfinite(plane)
    if bad.any():
        raise FormatError(path, PLANE_DTYPE.itemsize * int(np.flatnonzero(bad)[0]), "non-finite value")
    return plane


def _dataset(directory: PathLike, kind: str) -> Tuple[Path, Dict[str, str], int, int]:
    directory = Path(directory)
    fields = read_header(directory)
    if fields["kind"] != kind:
        raise FormatError(directory / HEADER_FILE, 0, f"expected a '{kind}' dataset, found '{fields['kind']}'")
    header = directory / HEADER_FILE
    return directory, fields, _positive_int(fields, "width", header), _positive_int(fields, "height", header)


def write_t3(directory: PathLike, raster: CoherencyRaster) -> None:
    directory = Path(directory)
    write_header(directory, {
        "kind": "t3", "width": raster.width, "height": raster.height, "looks": raster.looks,
        "byte_order": "little", "dtype": "float32",
    })
    t = raster.data
    values = [
        t[..., 0, 0].real, t[..., 1, 1].real, t[..., 2, 2].real,
        t[..., 0, 1].real, t[..., 0, 1].imag,
        t[..., 0, 2].real, t[..., 0, 2].imag,
        t[..., 1, 2].real, t[..., 1, 2].imag,
    ]
    _write_planes(directory, dict(zip(T3_PLANES, values)))
    logger.info(f"Wrote T3 dataset {directory} ({raster.width}x{raster.height}, {raster.looks} looks)")


def read_t3(directory: PathLike) -> CoherencyRaster:
    """
    Raises:
        FormatError: missing or malformed header, wrong plane size, negative diagonal

    Pixels whose matrix is not positive semi-definite are counted and logged as a warning.
    """
    directory, fields, width, height = _dataset(directory, "t3")
    looks = _positive_int(fields, "looks", directory / HEADER_FILE) if "looks" in fields else 1
    p = {name: _read_plane(directory / f"{name}.bin", width, height).astype(np.float64) for name in T3_PLANES}
    for name in T3_PLANES[:3]:
        negative = np.flatnonzero(p[name] < 0.0)
        if negative.size:
            raise FormatError(directory / f"{name}.bin", PLANE_DTYPE.itemsize * int(negative[0]),
                              "negative diagonal element")

    t12 = p["T12_real"] + 1j * p["T12_imag"]
    t13 = p["T13_real"] + 1j * p["T13_imag"]
    t23 = p["T23_real"] + 1j * p["T23_imag"]
    data = np.empty((height, width, 3, 3), dtype=np.complex128)
    data[..., 0, 0], data[..., 1, 1], data[..., 2, 2] = p["T11"], p["T22"], p["T33"]
    data[..., 0, 1], data[..., 0, 2], data[..., 1, 2] = t12, t13, t23
    data[..., 1, 0], data[..., 2, 0], data[..., 2, 1] = np.conj(t12), np.conj(t13), np.conj(t23)
    _warn_indefinite(directory, data)
    return CoherencyRaster(data, looks=looks)


def _warn_indefinite(directory: Path, data: np.ndarray) -> int:
    eigenvalues, _ = hermitian_eig_batch(data, psd=False)
    trace = np.real(np.trace(data, axis1=-2, axis2=-1))
    offending = int(np.count_nonzero(eigenvalues[..., -1] < -STORED_PSD_TOLERANCE * np.maximum(trace, 0.0)))
    if offending:
        logger.warning(f"{directory}: {offending} of {trace.size} pixel(s) not positive semi-definite")
    return offending


def write_slc(directory: PathLike, slc: SlcRaster) -> None:
    directory = Path(directory)
    write_header(directory, {
        "kind": "slc", "width": slc.width, "height": slc.height, "looks": 1,
        "byte_order": "little", "dtype": "float32",
    })
    s = slc.data
    values = [s[..., 0].real, s[..., 0].imag, s[..., 1].real, s[..., 1].imag, s[..., 2].real, s[..., 2].imag]
    _write_planes(directory, dict(zip(SLC_PLANES, values)))
    logger.info(f"Wrote SLC dataset {directory} ({slc.width}x{slc.height})")


def read_slc(directory: PathLike) -> SlcRaster:
    directory, _, width, height = _dataset(directory, "slc")
    p = [_read_plane(directory / f"{name}.bin", width, height).astype(np.float64) for name in SLC_PLANES]
    return SlcRaster(np.stack([p[0] + 1j * p[1], p[2] + 1j * p[3], p[4] + 1j * p[5]], axis=-1))


def dataset_kind(directory: PathLike) -> str:
    return read_header(directory)["kind"]


def read_raster(directory: PathLike) -> Union[CoherencyRaster, SlcRaster]:
    """Read a T3 or SLC dataset according to its header"""
    kind = dataset_kind(directory)
    if kind == "t3":
        return read_t3(directory)
    if kind == "slc":
        return read_slc(directory)
    raise FormatError(Path(directory) / HEADER_FILE, 0, f"unsupported dataset kind '{kind}'")


def write_haa(directory: PathLike, haa: HaaRaster, nodata: float = NODATA) -> None:
    directory = Path(directory)
    write_header(directory, {
        "kind": "haa", "width": haa.width, "height": haa.height, "nodata": nodata,
        "byte_order": "little", "dtype": "float32",
    })
    _write_planes(directory, haa.planes(nodata))
    logger.info(f"Wrote H/A/alpha planes to {directory}")


def read_haa(directory: PathLike) -> Dict[str, np.ndarray]:
    directory, _, width, height = _dataset(directory, "haa")
    return {name: _read_plane(directory / f"{name}.bin", width, height) for name in HAA_PLANES}


# ---------------------------------------------------------------------------
# PGM / PPM
# ---------------------------------------------------------------------------

def _netpbm_header(magic: str, width: int, height: int) -> bytes:
    return f"{magic}\n{width} {height}\n255\n".encode("ascii")


def _read_netpbm(path: PathLike, magic: bytes) -> Tuple[int, int, np.ndarray]:
    """Parse a binary PGM/PPM header; returns (width, height, raw bytes after the header)"""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise FormatError(path, 0, f"cannot read file: {e.strerror}")
    if data[:2] != magic:
        raise FormatError(path, 0, f"expected magic number {magic.decode()}")

    tokens: List[int] = []
    offset = 2
    while len(tokens) < 3:
        while offset < len(data) and data[offset:offset + 1].isspace():
            offset += 1
        if offset < len(data) and data[offset:offset + 1] == b"#":
            while offset < len(data) and data[offset:offset + 1] not in (b"\n", b"\r"):
                offset += 1
            continue
        start = offset
        while offset < len(data) and data[offset:offset + 1].isdigit():
            offset += 1
        if start == offset:
            raise FormatError(path, offset, "malformed header")
        tokens.append(int(data[start:offset]))
    width, height, maxval = tokens
    if maxval != 255:
        raise FormatError(path, offset, f"only 8-bit images are supported, maxval {maxval}")
    if width < 1 or height < 1:
        raise FormatError(path, offset, f"invalid size {width}x{height}")
    # exactly one whitespace byte ends the header
    offset += 1
    body = data[offset:]
    return width, height, np.frombuffer(body, dtype=np.uint8) if body else np.zeros(0, dtype=np.uint8)


def write_pgm(path: PathLike, labels: np.ndarray) -> None:
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    height, width = labels.shape
    Path(path).write_bytes(_netpbm_header("P5", width, height) + labels.tobytes())


def read_pgm(path: PathLike) -> np.ndarray:
    width, height, body = _read_netpbm(path, b"P5")
    if body.size != width * height:
        raise FormatError(path, Path(path).stat().st_size, f"expected {width * height} pixel bytes, found {body.size}")
    return body.reshape(height, width).copy()


def write_ppm(path: PathLike, rgb: np.ndarray) -> None:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    height, width, _ = rgb.shape
    Path(path).write_bytes(_netpbm_header("P6", width, height) + rgb.tobytes())


def read_ppm(path: PathLike) -> np.ndarray:
    width, height, body = _read_netpbm(path, b"P6")
    if body.size != 3 * width * height:
        raise FormatError(path, Path(path).stat().st_size,
                          f"expected {3 * width * height} pixel bytes, found {body.size}")
    return body.reshape(height, width, 3).copy()


def palette_color(class_id: int) -> Tuple[int, int, int]:
    if class_id in PALETTE_FIXED:
        return PALETTE_FIXED[class_id]
    return PALETTE_CYCLE[(class_id - 4) % len(PALETTE_CYCLE)]


def palette_image(labels: np.ndarray) -> np.ndarray:
    lut = np.array([palette_color(k) for k in range(256)], dtype=np.uint8)
    return lut[np.asarray(labels, dtype=np.uint8)]


def write_mask(path: PathLike, mask: Union[LabelMask, ClassMap]) -> None:
    write_pgm(path, mask.labels)
    logger.info(f"Wrote label image {path}")


def read_mask(path: PathLike) -> LabelMask:
    return LabelMask(read_pgm(path))


def write_class_map(path: PathLike, class_map: ClassMap) -> None:
    write_ppm(path, palette_image(class_map.labels))
    logger.info(f"Wrote class map {path}")


def read_class_map(path: PathLike) -> ClassMap:
    """
    Read a class map from a palette PPM or a PGM label image.

    Cycle colors repeat every 12 classes; a repeated color decodes to the lowest class id.
    """
    with open(path, "rb") as f:
        magic = f.read(2)
    if magic == b"P5":
        return ClassMap(read_pgm(path))
    rgb = read_ppm(path)
    codes = (rgb[..., 0].astype(np.uint32) << 16) | (rgb[..., 1].astype(np.uint32) << 8) | rgb[..., 2]
    lookup: Dict[int, int] = {}
    for class_id in range(255, 0, -1):
        r, g, b = palette_color(class_id)
        lookup[(r << 16) | (g << 8) | b] = class_id
    keys = np.array(sorted(lookup), dtype=np.uint32)
    position = np.clip(np.searchsorted(keys, codes), 0, len(keys) - 1)
    unknown = keys[position] != codes
    if unknown.any():
        index = int(np.flatnonzero(unknown.ravel())[0])
        header = Path(path).stat().st_size - rgb.size
        raise FormatError(path, header + 3 * index, "pixel color is not in the class palette")
    values = np.array([lookup[int(k)] for k in keys], dtype=np.uint8)
    return ClassMap(values[position])


# ---------------------------------------------------------------------------
# Model text files
# ---------------------------------------------------------------------------

def _num(value: float) -> str:
    return NUMBER_FORMAT.format(float(value))


def _nums(values) -> str:
    return " ".join(_num(v) for v in np.ravel(values))


def dump_wishart_model(model: WishartModel) -> str:
    lines = ["kind wishart", f"looks {model.looks}", f"classes {len(model.classes)}"]
    for c in model.classes:
        lines.append(f"class {c.class_id} {_nums(c.center.to_planes())}")
    return "\n".join(lines) + "\n"


def dump_svm_model(model: SvmModel) -> str:
    k = model.kernel
    lines = [
        "kind svm",
        f"kernel {k.kind.value}",
        f"gamma {_num(k.gamma)}",
        f"degree {k.degree}",
        f"cost {_num(model.cost)}",
        "classes " + " ".join(str(c) for c in model.class_ids),
        f"scaler_mean {_nums(model.scaler.mean)}",
        f"scaler_std {_nums(model.scaler.std)}",
        f"machines {len(model.machines)}",
    ]
    for m in model.machines:
        lines.append(
            f"machine {m.positive_class} {m.negative_class} {len(m.alphas)} {_num(m.bias)} {m.iterations}"
        )
        for x, y, a in zip(m.support_vectors, m.labels, m.alphas):
            lines.append(f"sv {int(y)} {_num(a)} {_nums(x)}")
    return "\n".join(lines) + "\n"


def dump_model(model: Union[WishartModel, SvmModel]) -> str:
    if isinstance(model, WishartModel):
        return dump_wishart_model(model)
    return dump_svm_model(model)


class _Lines:
    """Line cursor that reports 1-based line numbers in FormatError"""

    def __init__(self, text: str, source: str):
        self.lines = [line.split() for line in text.splitlines()]
        self.source = source
        self.number = 0

    def next(self, keyword: str, count: Optional[int] = None) -> List[str]:
        while self.number < len(self.lines) and not self.lines[self.number]:
            self.number += 1
        if self.number >= len(self.lines):
            raise FormatError(self.source, self.number, f"unexpected end of file, expected '{keyword}'")
        fields = self.lines[self.number]
        self.number += 1
        if fields[0] != keyword:
            self.fail(f"expected '{keyword}', got '{fields[0]}'")
        if count is not None and len(fields) - 1 != count:
            self.fail(f"'{keyword}' takes {count} value(s), got {len(fields) - 1}")
        return fields[1:]

    def fail(self, reason: str):
        raise FormatError(self.source, self.number, reason)

    def numbers(self, values: Sequence[str], kind=float) -> List:
        try:
            return [kind(v) for v in values]
        except ValueError as e:
            self.fail(str(e))


def load_wishart_model(text: str, source: str = "<model>") -> WishartModel:
    cursor = _Lines(text, source)
    if cursor.next("kind", 1) != ["wishart"]:
        cursor.fail("not a Wishart model")
    looks = cursor.numbers(cursor.next("looks", 1), int)[0]
    count = cursor.numbers(cursor.next("classes", 1), int)[0]
    centers: Dict[int, HermitianMatrix3] = {}
    for _ in range(count):
        values = cursor.next("class", 10)
        class_id = cursor.numbers(values[:1], int)[0]
        centers[class_id] = HermitianMatrix3.from_planes(cursor.numbers(values[1:]))
    return WishartModel.from_centers(centers, looks)


def load_svm_model(text: str, source: str = "<model>") -> SvmModel:
    cursor = _Lines(text, source)
    if cursor.next("kind", 1) != ["svm"]:
        cursor.fail("not an SVM model")
    kind = cursor.next("kernel", 1)[0]
    gamma = cursor.numbers(cursor.next("gamma", 1))[0]
    degree = cursor.numbers(cursor.next("degree", 1), int)[0]
    try:
        kernel = Kernel(kind=kind, gamma=gamma, degree=degree)
    except ValidationError as e:
        cursor.fail(describe_validation_error(e))
    cost = cursor.numbers(cursor.next("cost", 1))[0]
    class_ids = tuple(cursor.numbers(cursor.next("classes"), int))
    mean = np.array(cursor.numbers(cursor.next("scaler_mean")))
    std = np.array(cursor.numbers(cursor.next("scaler_std"), float))
    if mean.shape != std.shape or np.any(std <= 0.0):
        cursor.fail("scaler statistics are inconsistent")
    count = cursor.numbers(cursor.next("machines", 1), int)[0]

    machines = []
    for _ in range(count):
        header = cursor.next("machine", 5)
        positive, negative, n_sv = cursor.numbers(header[:3], int)
        bias = cursor.numbers(header[3:4])[0]
        iterations = cursor.numbers(header[4:5], int)[0]
        rows = [cursor.numbers(cursor.next("sv", 2 + len(mean))) for _ in range(n_sv)]
        rows = np.array(rows).reshape(n_sv, 2 + len(mean))
        machines.append(BinaryMachine(
            positive, negative,
            support_vectors=rows[:, 2:], labels=rows[:, 0], alphas=rows[:, 1],
            bias=bias, iterations=iterations,
        ))
    return SvmModel(kernel, cost, FeatureScaler(mean, std), class_ids, tuple(machines))


def load_model(text: str, source: str = "<model>") -> Union[WishartModel, SvmModel]:
    first = next((line.split() for line in text.splitlines() if line.strip()), [])
    if first == ["kind", "wishart"]:
        return load_wishart_model(text, source)
    if first == ["kind", "svm"]:
        return load_svm_model(text, source)
    raise FormatError(source, 1, "expected 'kind wishart' or 'kind svm'")


def write_model(path: PathLike, model: Union[WishartModel, SvmModel]) -> None:
    Path(path).write_text(dump_model(model))
    logger.info(f"Wrote model {path}")


def read_model(path: PathLike) -> Union[WishartModel, SvmModel]:
    path = Path(path)
    if not path.is_file():
        raise FormatError(path, 0, "model file not found")
    return load_model(path.read_text(), str(path))


# ---------------------------------------------------------------------------
# Pipeline configuration and scene metadata
# ---------------------------------------------------------------------------

SCENE_KEYS = ("width", "height", "looks", "basis", "train_per_class")
CLASS_KEYS = ("name", "center", "regions")


def _parse_regions(text: str, key: str) -> List[Rectangle]:
    regions = []
    for item in filter(None, (part.strip() for part in text.split(";"))):
        parts = item.split(":")
        if len(parts) != 4:
            raise ConfigError(f"{key}: region '{item}' is not x0:y0:x1:y1")
        try:
            x0, y0, x1, y1 = (int(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{key}: region '{item}' has non-integer coordinates")
        regions.append(Rectangle(x0=x0, y0=y0, x1=x1, y1=y1))
    return regions


def _parse_scene(entries: Dict[str, str], seed: int) -> SceneSpec:
    scene: Dict[str, Any] = {"seed": seed}
    classes: Dict[int, Dict[str, Any]] = {}
    for key, value in entries.items():
        parts = key.split(".")
        if len(parts) == 2 and parts[1] in SCENE_KEYS:
            scene[parts[1]] = value
        elif len(parts) == 4 and parts[1] == "class" and parts[3] in CLASS_KEYS:
            try:
                class_id = int(parts[2])
            except ValueError:
                raise ConfigError(f"unknown key '{key}'")
            entry = classes.setdefault(class_id, {"class_id": class_id})
            if parts[3] == "center":
                try:
                    entry["center"] = [float(v) for v in value.replace(",", " ").split()]
                except ValueError:
                    raise ConfigError(f"{key}: center must be 9 real numbers")
            elif parts[3] == "regions":
                entry["regions"] = _parse_regions(value, key)
            else:
                entry["name"] = value
        else:
            raise ConfigError(f"unknown key '{key}'")
    scene["classes"] = [classes[k] for k in sorted(classes)]
    return SceneSpec(**scene)


def read_pipeline_config(path: PathLike, overrides: Optional[Dict[str, Any]] = None) -> PipelineConfig:
    """
    Parse a flat key=value pipeline file; overrides (command-line flags) win over file values.

    Raises:
        ConfigError: missing file, unknown key, key without value or invalid value
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file {path} not found")
    values = dotenv_values(path, interpolate=False)
    flat: Dict[str, Any] = {}
    scene: Dict[str, str] = {}
    for key, value in values.items():
        if value is None:
            raise ConfigError(f"{path}: key '{key}' has no value")
        if key.startswith("scene."):
            scene[key] = value
        else:
            flat[key] = value
    flat.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        if scene:
            flat["scene"] = _parse_scene(scene, int(flat.get("seed", 0)))
        config = PipelineConfig(**flat)
    except ValidationError as e:
        raise ConfigError(f"{path}: {describe_validation_error(e)}") from e
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e
    return config


def write_scene_metadata(path: PathLike, metadata: Dict[str, Any]) -> None:
    Path(path).write_text(yaml.safe_dump(metadata, sort_keys=False, default_flow_style=None))


def read_scene_metadata(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scene metadata {path} not found")
    try:
        metadata = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: {e}") from e
    if not isinstance(metadata, dict):
        raise ConfigError(f"{path}: expected a mapping of scene fields")
    return metadata


def scene_from_metadata(metadata: Dict[str, Any]) -> SceneSpec:
    """
    Rebuild the SceneSpec recorded in a metadata sidecar.

    Raises:
        ConfigError: a field is missing or invalid
    """
    try:
        return _scene_from_metadata(metadata)
    except KeyError as e:
        raise ConfigError(f"scene metadata lacks {e}") from e
    except ValidationError as e:
        raise ConfigError(f"scene metadata: {describe_validation_error(e)}") from e
    except (TypeError, IndexError) as e:
        raise ConfigError(f"scene metadata: {e}") from e


def _scene_from_metadata(metadata: Dict[str, Any]) -> SceneSpec:
    return SceneSpec(
        width=metadata["width"],
        height=metadata["height"],
        looks=metadata["looks"],
        basis=metadata["basis"],
        seed=metadata["rng"]["seed"],
        train_per_class=metadata["train_per_class"],
        classes=[
            SceneClass(
                class_id=c["id"], name=c["name"], center=c["center"],
                regions=[Rectangle(x0=r[0], y0=r[1], x1=r[2], y1=r[3]) for r in c["regions"]],
            )
            for c in metadata["classes"]
        ],
    )
