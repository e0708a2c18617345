"""
Command-line pipeline
Subcommands that read and write the toolkit's file formats: synth, filter, decompose, pauli-rgb,
train-wishart, classify-wishart, train-svm, classify-svm, evaluate, run and serve
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError

from app import __version__
from app.core_types import CoherencyRaster, SlcRaster, single_look_raster
from app.decomposition import haa_raster, pauli_rgb
from app.errors import ConfigError, PolsarError, describe_validation_error
from app.evaluation import ConfusionMatrix, confusion, mean_recall, overall_accuracy
from app.formats import (
    read_class_map,
    read_mask,
    read_model,
    read_pipeline_config,
    read_raster,
    read_scene_metadata,
    scene_from_metadata,
    write_class_map,
    write_haa,
    write_mask,
    write_model,
    write_ppm,
    write_scene_metadata,
    write_slc,
    write_t3,
)
from app.models import FilterMode, PipelineConfig, SceneSpec
from app.settings import API_HOST, API_PORT, LOG_LEVEL, configure_logging
from app.speckle import apply_filter, boxcar_multilook
from app.svm import SvmModel, classify_svm, class_statistics, extract_features, train_svm_raster
from app.synth import generate_scene, generate_slc, scene_metadata, select_training_pixels, three_class_scene
from app.wishart import ClassMap, LabelMask, WishartModel, check_dimensions, classify_wishart, train_wishart

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

METADATA_FILE = "scene.yaml"

# command-line flag -> PipelineConfig key
CONFIG_FLAGS = {
    "input": "input",
    "output": "output",
    "truth": "truth",
    "train_mask": "train_mask",
    "model": "model",
    "predicted": "predicted",
    "mode": "filter_mode",
    "window": "filter_window",
    "looks": "filter_looks",
    "kernel": "kernel",
    "gamma": "gamma",
    "cost": "cost",
    "degree": "degree",
    "tolerance": "tolerance",
    "max_iterations": "max_iterations",
    "seed": "seed",
    "names": "class_names",
}


def load_config(args: argparse.Namespace) -> PipelineConfig:
    """Config file values overridden by any flag given on the command line"""
    overrides = {
        key: getattr(args, flag)
        for flag, key in CONFIG_FLAGS.items()
        if getattr(args, flag, None) is not None
    }
    if getattr(args, "config", None):
        return read_pipeline_config(args.config, overrides)
    return PipelineConfig(**overrides)


def _require(cfg: PipelineConfig, key: str) -> str:
    value = getattr(cfg, key)
    if not value:
        raise ConfigError(f"missing required setting '{key}' (flag --{key.replace('_', '-')} or config key)")
    return value


def _coherency(raster: Union[CoherencyRaster, SlcRaster]) -> CoherencyRaster:
    if isinstance(raster, SlcRaster):
        return single_look_raster(raster)
    return raster


def _register_classifier(name: str, model: Union[WishartModel, SvmModel]) -> int:
    from app import crud
    from app.database import SessionLocal, init_db

    init_db()
    with SessionLocal() as db:
        record = crud.create_classifier(db, name, model)
        logger.info(f"Registered {record.kind} classifier '{name}' as id {record.id}")
        return record.id


def _register_evaluation(name: str, cm: ConfusionMatrix, classifier: Optional[str]) -> int:
    from app import crud
    from app.database import SessionLocal, init_db

    init_db()
    with SessionLocal() as db:
        classifier_id = None
        if classifier:
            record = crud.get_classifier_by_name(db, classifier)
            if not record:
                raise ConfigError(f"no registered classifier named '{classifier}'")
            classifier_id = record.id
        evaluation = crud.create_evaluation(db, name, cm, classifier_id)
        logger.info(f"Registered evaluation '{name}' as id {evaluation.id}")
        return evaluation.id


def report_statistics(raster: CoherencyRaster, mask: LabelMask) -> None:
    """Per-class backscatter statistics of the training pixels"""
    check_dimensions(raster, mask)
    for class_id, s in class_statistics(extract_features(raster), mask).items():
        logger.info(
            f"class {class_id}: {s.count} training pixels, "
            f"mean T11/T22/T33 {s.mean[0]:.4g}/{s.mean[1]:.4g}/{s.mean[2]:.4g}, "
            f"std {s.std[0]:.4g}/{s.std[1]:.4g}/{s.std[2]:.4g}"
        )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    if args.from_metadata:
        if cfg.scene:
            raise ConfigError("--from-metadata and scene.* configuration keys are mutually exclusive")
        spec: SceneSpec = scene_from_metadata(read_scene_metadata(args.from_metadata))
        logger.info(f"Regenerating the scene recorded in {args.from_metadata} (seed {spec.seed})")
    else:
        spec = cfg.scene or three_class_scene(block=args.block, looks=args.scene_looks, seed=cfg.seed)
    output = Path(_require(cfg, "output"))
    if args.slc:
        slc, truth = generate_slc(spec)
        write_slc(output, slc)
    else:
        raster, truth = generate_scene(spec)
        write_t3(output, raster)
    write_scene_metadata(output / METADATA_FILE, scene_metadata(spec))
    if cfg.truth:
        write_mask(cfg.truth, truth)
    if cfg.train_mask:
        write_mask(cfg.train_mask, select_training_pixels(truth, spec.train_per_class, spec.seed))
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    source = read_raster(_require(cfg, "input"))
    looks = 1 if isinstance(source, SlcRaster) else source.looks
    filter_cfg = cfg.filter_config(input_looks=looks)
    if isinstance(source, SlcRaster) and filter_cfg.mode == FilterMode.BOXCAR:
        filtered = boxcar_multilook(source, filter_cfg.window)
    else:
        filtered = apply_filter(_coherency(source), filter_cfg)
    write_t3(_require(cfg, "output"), filtered)
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    haa = haa_raster(_coherency(read_raster(_require(cfg, "input"))))
    write_haa(_require(cfg, "output"), haa)
    return EXIT_OK


def cmd_pauli_rgb(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    raster = _coherency(read_raster(_require(cfg, "input")))
    write_ppm(_require(cfg, "output"), pauli_rgb(raster, args.low, args.high))
    return EXIT_OK


def cmd_train_wishart(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    raster = _coherency(read_raster(_require(cfg, "input")))
    mask = read_mask(_require(cfg, "train_mask"))
    report_statistics(raster, mask)
    model = train_wishart(raster, mask)
    write_model(_require(cfg, "model"), model)
    if args.register:
        _register_classifier(args.register, model)
    return EXIT_OK


def cmd_train_svm(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    raster = _coherency(read_raster(_require(cfg, "input")))
    mask = read_mask(_require(cfg, "train_mask"))
    report_statistics(raster, mask)
    model = train_svm_raster(raster, mask, cfg.kernel_config(), cfg.cost, cfg.tolerance, cfg.max_iterations)
    write_model(_require(cfg, "model"), model)
    if args.register:
        _register_classifier(args.register, model)
    return EXIT_OK


def _classify(args: argparse.Namespace, expected: type) -> int:
    cfg = load_config(args)
    raster = _coherency(read_raster(_require(cfg, "input")))
    model = read_model(_require(cfg, "model"))
    if not isinstance(model, expected):
        raise ConfigError(f"{cfg.model} does not hold a {'Wishart' if expected is WishartModel else 'SVM'} model")
    if isinstance(model, WishartModel):
        class_map = classify_wishart(raster, model)
    else:
        class_map = classify_svm(extract_features(raster), model)
    write_class_map(_require(cfg, "output"), class_map)
    if args.labels:
        write_mask(args.labels, class_map)
    return EXIT_OK


def cmd_classify_wishart(args: argparse.Namespace) -> int:
    return _classify(args, WishartModel)


def cmd_classify_svm(args: argparse.Namespace) -> int:
    return _classify(args, SvmModel)


def _evaluate(truth: LabelMask, predicted: ClassMap, names: Optional[List[str]]) -> ConfusionMatrix:
    class_ids = None
    if names:
        class_ids = list(range(1, len(names) + 1))
    return confusion(truth, predicted, class_ids, names)


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    truth = read_mask(_require(cfg, "truth"))
    predicted = read_class_map(_require(cfg, "predicted"))
    cm = _evaluate(truth, predicted, cfg.names())
    report = cm.to_csv()
    sys.stdout.write(report)
    if cfg.output:
        Path(cfg.output).write_text(report)
        logger.info(f"Wrote confusion report {cfg.output}")
    if args.register:
        _register_evaluation(args.register, cm, args.classifier)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    """synth -> filter -> Wishart and SVM -> evaluate, all files under one work directory"""
    cfg = load_config(args)
    spec = cfg.scene or three_class_scene(looks=1, seed=cfg.seed)
    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    if spec.looks == 1:
        slc, truth = generate_slc(spec)
        write_slc(workdir / "slc", slc)
        filter_cfg = cfg.filter_config(input_looks=1)
        if filter_cfg.mode == FilterMode.BOXCAR:
            raster = boxcar_multilook(slc, filter_cfg.window)
        else:
            raster = apply_filter(single_look_raster(slc), filter_cfg)
    else:
        raster, truth = generate_scene(spec)
        raster = apply_filter(raster, cfg.filter_config(input_looks=spec.looks))
    write_scene_metadata(workdir / METADATA_FILE, scene_metadata(spec))
    write_t3(workdir / "t3", raster)
    write_mask(workdir / "truth.pgm", truth)
    train = select_training_pixels(truth, spec.train_per_class, spec.seed)
    write_mask(workdir / "train.pgm", train)
    write_haa(workdir / "haa", haa_raster(raster))
    write_ppm(workdir / "pauli.ppm", pauli_rgb(raster))
    report_statistics(raster, train)

    names = cfg.names() or [c.display_name for c in sorted(spec.classes, key=lambda c: c.class_id)]
    class_ids = sorted(c.class_id for c in spec.classes)

    for kind in ("wishart", "svm"):
        if kind == "wishart":
            model = train_wishart(raster, train)
            class_map = classify_wishart(raster, model)
        else:
            model = train_svm_raster(raster, train, cfg.kernel_config(), cfg.cost, cfg.tolerance, cfg.max_iterations)
            class_map = classify_svm(extract_features(raster), model)
        write_model(workdir / f"{kind}.model", model)
        write_class_map(workdir / f"{kind}.ppm", class_map)
        cm = confusion(truth, class_map, class_ids, names)
        report = cm.to_csv()
        (workdir / f"{kind}_confusion.csv").write_text(report)
        sys.stdout.write(f"# {kind}\n{report}")
        logger.info(
            f"{kind}: overall accuracy {overall_accuracy(cm):.2f}%, mean recall {mean_recall(cm):.2f}%"
        )
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("app.main_api:app", host=args.host, port=args.port, log_level=args.log_level.lower())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value pipeline configuration file")


def _add_io(p: argparse.ArgumentParser, *flags: str) -> None:
    help_text = {
        "input": "input dataset directory (T3 or SLC)",
        "output": "output path",
        "truth": "ground-truth label mask (PGM)",
        "train_mask": "training label mask (PGM)",
        "model": "model file",
        "predicted": "predicted class map (PPM or PGM)",
    }
    for flag in flags:
        p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, help=help_text[flag])


def _add_svm_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", choices=["rbf", "polynomial", "sigmoid"])
    p.add_argument("--gamma", type=float, help="RBF gamma (default 0.444)")
    p.add_argument("--cost", type=float, help="box constraint C (default 100)")
    p.add_argument("--degree", type=int, help="polynomial degree (default 3)")
    p.add_argument("--tolerance", type=float, help="KKT tolerance (default 1e-3)")
    p.add_argument("--max-iterations", dest="max_iterations", type=int, help="SMO iterations per class pair")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polsar",
        description="PolSAR coherency filtering, H/A/alpha decomposition and Wishart/SVM classification"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", dest="log_level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic Wishart scene")
    _add_config(p)
    _add_io(p, "output", "truth", "train_mask")
    p.add_argument("--seed", type=int)
    p.add_argument("--block", type=int, default=100, help="side of each class block in the default scene")
    p.add_argument("--scene-looks", dest="scene_looks", type=int, default=9, help="looks of the default scene")
    p.add_argument("--slc", action="store_true", help="write single-look scattering data instead of T3")
    p.add_argument("--from-metadata", dest="from_metadata", metavar="SCENE_YAML",
                   help="regenerate the scene recorded in a scene.yaml sidecar, seed included")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("filter", help="speckle filter / multilook a dataset")
    _add_config(p)
    _add_io(p, "input", "output")
    p.add_argument("--window", type=int, help="odd window size (default 3)")
    p.add_argument("--mode", choices=["boxcar", "lee"])
    p.add_argument("--looks", type=float, help="equivalent looks for Lee weighting (default: input looks)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("decompose", help="H/A/alpha planes")
    _add_config(p)
    _add_io(p, "input", "output")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("pauli-rgb", help="Pauli RGB composite (PPM)")
    _add_config(p)
    _add_io(p, "input", "output")
    p.add_argument("--low", type=float, default=2.0, help="lower stretch percentile")
    p.add_argument("--high", type=float, default=98.0, help="upper stretch percentile")
    p.set_defaults(func=cmd_pauli_rgb)

    for kind, func in (("wishart", cmd_train_wishart), ("svm", cmd_train_svm)):
        p = sub.add_parser(f"train-{kind}", help=f"train a {kind} classifier")
        _add_config(p)
        _add_io(p, "input", "train_mask", "model")
        if kind == "svm":
            _add_svm_params(p)
        p.add_argument("--register", metavar="NAME", help="store the model in the classifier registry")
        p.set_defaults(func=func)

    for kind, func in (("wishart", cmd_classify_wishart), ("svm", cmd_classify_svm)):
        p = sub.add_parser(f"classify-{kind}", help=f"classify with a {kind} model")
        _add_config(p)
        _add_io(p, "input", "model", "output")
        p.add_argument("--labels", help="also write the class labels as PGM")
        p.set_defaults(func=func)

    p = sub.add_parser("evaluate", help="confusion matrix CSV")
    _add_config(p)
    _add_io(p, "truth", "predicted", "output")
    p.add_argument("--names", help="comma separated class names in class id order")
    p.add_argument("--register", metavar="NAME", help="store the report in the registry")
    p.add_argument("--classifier", metavar="NAME", help="registered classifier the report belongs to")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run", help="full synthetic pipeline into a work directory")
    _add_config(p)
    p.add_argument("--workdir", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--mode", choices=["boxcar", "lee"])
    _add_svm_params(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="start the classifier registry API")
    p.add_argument("--host", default=API_HOST)
    p.add_argument("--port", type=int, default=API_PORT)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.log_level = (args.log_level or LOG_LEVEL).upper()
    configure_logging(args.log_level)

    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {describe_validation_error(e)}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PolsarError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
