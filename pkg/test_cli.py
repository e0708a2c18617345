"""
End-to-end tests of the command-line pipeline
"""

from pathlib import Path

import pytest

from app import crud
from app.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from app.database import SessionLocal
from app.formats import read_header, read_pgm, read_pipeline_config, read_ppm, read_t3

SMALL_SCENE = """
seed=5
filter_mode={mode}
filter_window=3
class_names=Urban,Vegetation,Water
scene.width=36
scene.height=12
scene.looks={looks}
scene.train_per_class=60
scene.class.1.name=Urban
scene.class.1.center=1.0 0.8 0.1 0.6 0 0 0 0 0
scene.class.1.regions=0:0:12:12
scene.class.2.name=Vegetation
scene.class.2.center=0.5 0.5 0.5 0 0 0 0 0 0
scene.class.2.regions=12:0:24:12
scene.class.3.name=Water
scene.class.3.center=0.4 0.05 0.02 0 0 0 0 0 0
scene.class.3.regions=24:0:36:12
"""


def write_config(path: Path, mode: str = "boxcar", looks: int = 9) -> str:
    path.write_text(SMALL_SCENE.format(mode=mode, looks=looks))
    return str(path)


@pytest.fixture
def scene(tmp_path):
    """A 36x12 three-class T3 dataset with truth and training masks"""
    assert main([
        "synth", "--output", str(tmp_path / "t3"), "--truth", str(tmp_path / "truth.pgm"),
        "--train-mask", str(tmp_path / "train.pgm"), "--block", "12", "--seed", "3",
    ]) == EXIT_OK
    return tmp_path


def test_synth_writes_dataset_and_masks(scene):
    header = read_header(scene / "t3")
    assert (header["kind"], header["width"], header["height"], header["looks"]) == ("t3", "36", "12", "9")
    assert (scene / "t3" / "scene.yaml").is_file()
    assert read_pgm(scene / "truth.pgm").shape == (12, 36)
    assert set(read_pgm(scene / "train.pgm").ravel()) == {1, 2, 3}


def test_wishart_train_classify_evaluate(scene, capsys):
    assert main(["train-wishart", "--input", str(scene / "t3"), "--train-mask", str(scene / "train.pgm"),
                 "--model", str(scene / "w.model")]) == EXIT_OK
    assert (scene / "w.model").read_text().startswith("kind wishart\n")
    assert main(["classify-wishart", "--input", str(scene / "t3"), "--model", str(scene / "w.model"),
                 "--output", str(scene / "w.ppm"), "--labels", str(scene / "w.pgm")]) == EXIT_OK
    assert read_ppm(scene / "w.ppm").shape == (12, 36, 3)

    capsys.readouterr()
    assert main(["evaluate", "--truth", str(scene / "truth.pgm"), "--predicted", str(scene / "w.ppm"),
                 "--names", "Urban,Vegetation,Water", "--output", str(scene / "w.csv")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("class,Urban,Vegetation,Water\n")
    assert out == (scene / "w.csv").read_text()
    assert float(out.strip().splitlines()[-1].split(",")[1]) >= 90.0


def test_svm_train_classify(scene):
    assert main(["train-svm", "--input", str(scene / "t3"), "--train-mask", str(scene / "train.pgm"),
                 "--model", str(scene / "s.model"), "--gamma", "0.5", "--cost", "10"]) == EXIT_OK
    text = (scene / "s.model").read_text()
    assert "gamma 0.5\n" in text and "cost 10\n" in text
    assert main(["classify-svm", "--input", str(scene / "t3"), "--model", str(scene / "s.model"),
                 "--output", str(scene / "s.ppm")]) == EXIT_OK
    assert read_ppm(scene / "s.ppm").shape == (12, 36, 3)


def test_classify_with_wrong_model_kind(scene):
    main(["train-wishart", "--input", str(scene / "t3"), "--train-mask", str(scene / "train.pgm"),
          "--model", str(scene / "w.model")])
    assert main(["classify-svm", "--input", str(scene / "t3"), "--model", str(scene / "w.model"),
                 "--output", str(scene / "x.ppm")]) == EXIT_CONFIG


def test_evaluate_truth_against_itself(scene, capsys):
    capsys.readouterr()
    assert main(["evaluate", "--truth", str(scene / "truth.pgm"), "--predicted", str(scene / "truth.pgm")]) == EXIT_OK
    assert capsys.readouterr().out.strip().splitlines()[-1] == "overall,100.00"


def test_filter_window_one_is_identity(scene):
    assert main(["filter", "--input", str(scene / "t3"), "--output", str(scene / "f1"), "--window", "1"]) == EXIT_OK
    for plane in ("T11.bin", "T12_imag.bin", "T33.bin"):
        assert (scene / "f1" / plane).read_bytes() == (scene / "t3" / plane).read_bytes()


def test_filter_modes(scene):
    assert main(["filter", "--input", str(scene / "t3"), "--output", str(scene / "box")]) == EXIT_OK
    assert read_t3(scene / "box").looks == 81
    assert main(["filter", "--input", str(scene / "t3"), "--output", str(scene / "lee"),
                 "--mode", "lee", "--window", "5"]) == EXIT_OK
    assert read_t3(scene / "lee").looks == 9


def test_filter_single_look_data(tmp_path):
    assert main(["synth", "--slc", "--output", str(tmp_path / "slc"), "--block", "9", "--scene-looks", "1"]) == EXIT_OK
    assert read_header(tmp_path / "slc")["kind"] == "slc"
    assert main(["filter", "--input", str(tmp_path / "slc"), "--output", str(tmp_path / "t3")]) == EXIT_OK
    assert read_t3(tmp_path / "t3").looks == 9


def test_decompose_and_pauli_rgb(scene):
    assert main(["decompose", "--input", str(scene / "t3"), "--output", str(scene / "haa")]) == EXIT_OK
    assert read_header(scene / "haa")["kind"] == "haa"
    assert main(["pauli-rgb", "--input", str(scene / "t3"), "--output", str(scene / "pauli.ppm")]) == EXIT_OK
    assert read_ppm(scene / "pauli.ppm").shape == (12, 36, 3)


def test_run_is_deterministic(tmp_path, capsys):
    config = write_config(tmp_path / "pipeline.conf")
    for name in ("a", "b"):
        assert main(["run", "--config", config, "--workdir", str(tmp_path / name)]) == EXIT_OK
    for artifact in ("wishart_confusion.csv", "svm_confusion.csv", "wishart.ppm", "svm.ppm",
                     "truth.pgm", "train.pgm", "t3/T11.bin", "haa/alpha.bin", "pauli.ppm"):
        assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes(), artifact
    report = (tmp_path / "a" / "wishart_confusion.csv").read_text()
    assert report.startswith("class,Urban,Vegetation,Water\n")
    assert "# svm\n" in capsys.readouterr().out


def test_run_from_single_look_data(tmp_path):
    config = write_config(tmp_path / "pipeline.conf", mode="lee", looks=1)
    assert main(["run", "--config", config, "--workdir", str(tmp_path / "w")]) == EXIT_OK
    assert read_header(tmp_path / "w" / "slc")["kind"] == "slc"
    assert (tmp_path / "w" / "svm_confusion.csv").is_file()


def test_register_model_and_report(scene, capsys):
    assert main(["train-wishart", "--input", str(scene / "t3"), "--train-mask", str(scene / "train.pgm"),
                 "--model", str(scene / "w.model"), "--register", "cli-wishart"]) == EXIT_OK
    assert main(["evaluate", "--truth", str(scene / "truth.pgm"), "--predicted", str(scene / "truth.pgm"),
                 "--register", "cli-report", "--classifier", "cli-wishart"]) == EXIT_OK
    with SessionLocal() as db:
        record = crud.get_classifier_by_name(db, "cli-wishart")
        assert record.kind == "wishart" and record.class_ids == "1,2,3"
        reports = crud.get_evaluations(db, record.id)
        assert [r.name for r in reports] == ["cli-report"]
        assert reports[0].overall_accuracy == 100.0

    # names are unique
    assert main(["train-wishart", "--input", str(scene / "t3"), "--train-mask", str(scene / "train.pgm"),
                 "--model", str(scene / "w.model"), "--register", "cli-wishart"]) == EXIT_CONFIG


def test_missing_required_setting(scene, capsys):
    assert main(["decompose", "--input", str(scene / "t3")]) == EXIT_CONFIG
    assert "output" in capsys.readouterr().err


def test_invalid_flag_value(scene):
    assert main(["filter", "--input", str(scene / "t3"), "--output", str(scene / "f"), "--window", "4"]) == EXIT_CONFIG


def test_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("colour=red\n")
    assert main(["run", "--config", str(config), "--workdir", str(tmp_path / "w")]) == EXIT_CONFIG
    assert "unknown key 'colour'" in capsys.readouterr().err


def test_unreadable_input(tmp_path, capsys):
    assert main(["decompose", "--input", str(tmp_path / "missing"), "--output", str(tmp_path / "o")]) == EXIT_FAILURE
    assert "header.txt" in capsys.readouterr().err


def test_evaluate_with_too_few_names(scene, capsys):
    assert main(["evaluate", "--truth", str(scene / "truth.pgm"), "--predicted", str(scene / "truth.pgm"),
                 "--names", "Urban,Vegetation"]) == EXIT_CONFIG
    assert "[3]" in capsys.readouterr().err


def test_default_run_classifies_nine_look_data(tmp_path):
    """Single-look default scene, 3x3 boxcar, so both classifiers see 9 looks"""
    assert main(["run", "--workdir", str(tmp_path / "w")]) == EXIT_OK
    assert read_header(tmp_path / "w" / "slc")["looks"] == "1"
    assert read_t3(tmp_path / "w" / "t3").looks == 9
    assert (tmp_path / "w" / "wishart.model").read_text().startswith("kind wishart\nlooks 9\n")


def test_example_config_multilooks_to_nine_looks():
    cfg = read_pipeline_config(Path(__file__).parent / "pipeline.example.conf")
    assert cfg.scene.looks == 1
    assert cfg.filter_config(input_looks=cfg.scene.looks).window ** 2 * cfg.scene.looks == 9


def test_synth_regenerates_scene_from_its_sidecar(scene, tmp_path):
    sidecar = scene / "t3" / "scene.yaml"
    assert main(["synth", "--from-metadata", str(sidecar), "--output", str(tmp_path / "again"),
                 "--truth", str(tmp_path / "again.pgm")]) == EXIT_OK
    assert (tmp_path / "again" / "T11.bin").read_bytes() == (scene / "t3" / "T11.bin").read_bytes()
    assert (tmp_path / "again" / "scene.yaml").read_text() == sidecar.read_text()
    assert (read_pgm(tmp_path / "again.pgm") == read_pgm(scene / "truth.pgm")).all()


def test_synth_from_missing_sidecar(tmp_path, capsys):
    assert main(["synth", "--from-metadata", str(tmp_path / "nope.yaml"), "--output", str(tmp_path / "t3")]) == EXIT_CONFIG
    assert "not found" in capsys.readouterr().err
