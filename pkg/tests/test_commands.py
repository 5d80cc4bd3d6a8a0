""" Tests for the glitchnet management commands """

import filecmp
import io

import numpy as np
import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from glitchnet import training
from glitchnet.checkpoints import load_checkpoint, save_checkpoint
from glitchnet.corpus import MANIFEST, VIEW_COLUMNS, export_corpus, import_corpus, write_view
from glitchnet.exceptions import NumericError
from glitchnet.models import ModelSpec, build

from .fixtures import TEST_VIEW_SHAPE


def run(*args, **kwargs) -> str:
    out = io.StringIO()
    call_command(*args, stdout=out, **kwargs)
    return out.getvalue()


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, glitch_corpus):
    """A shared corpus directory plus one single1 checkpoint trained on it for one epoch."""
    root = tmp_path_factory.mktemp("commands")
    export_corpus(glitch_corpus, root / "corpus")
    run("train", "--data", str(root / "corpus"), "--model", "single1", "--epochs", "1", "--batch", "10",
        "--out", str(root / "single1.ckpt"), "--log", str(root / "single1.csv"))  # fmt: skip
    return root


# -- gen_data


def test_gen_data_prints_manifest(tmp_path):
    output = run("gen_data", "--out", str(tmp_path / "corpus"), "--seed", "3")
    lines = output.splitlines()
    assert lines[0].startswith("sample_id,label,class_name,duration_category,split")
    assert len(lines) == 1 + 3 * 8
    corpus = import_corpus(tmp_path / "corpus")
    assert corpus.class_names == ("Blip", "Power Line", "Violin Mode")
    assert corpus.view_shape == TEST_VIEW_SHAPE
    assert (tmp_path / "corpus" / MANIFEST).read_text() == output


def test_gen_data_is_byte_identical(tmp_path):
    run("gen_data", "--out", str(tmp_path / "a"), "--seed", "5", "--per-class", "8")
    run("gen_data", "--out", str(tmp_path / "b"), "--seed", "5", "--per-class", "8")
    comparison = filecmp.dircmp(tmp_path / "a", tmp_path / "b")
    assert not comparison.diff_files and not comparison.left_only and not comparison.right_only
    views = filecmp.dircmp(tmp_path / "a" / "views", tmp_path / "b" / "views")
    _, mismatch, errors = filecmp.cmpfiles(tmp_path / "a" / "views", tmp_path / "b" / "views", views.common_files,
                                           shallow=False)  # fmt: skip
    assert not mismatch and not errors


def test_gen_data_paper_scale_reports_delta(tmp_path, glitchnet_settings):
    glitchnet_settings.GLITCHNET_PAPER_TOTAL = 31
    err = io.StringIO()
    run("gen_data", "--out", str(tmp_path / "corpus"), "--scale", "paper", stderr=err)
    assert len(import_corpus(tmp_path / "corpus")) == 30
    assert "30 samples (10 per class), 1 fewer than the 31" in err.getvalue()


def test_gen_data_noise_floor_setting(tmp_path, glitchnet_settings):
    run("gen_data", "--out", str(tmp_path / "default"))
    glitchnet_settings.GLITCHNET_NOISE_FLOOR = 0.0
    run("gen_data", "--out", str(tmp_path / "clean"))
    default, clean = import_corpus(tmp_path / "default"), import_corpus(tmp_path / "clean")
    assert default.samples != clean.samples
    assert default.splits == clean.splits


def test_gen_data_rejects_tiny_corpus(tmp_path):
    with pytest.raises(CommandError, match="^ValidationError: per_class"):
        run("gen_data", "--out", str(tmp_path / "corpus"), "--per-class", "2")


# -- train


def test_train_writes_checkpoint_and_log(workspace):
    checkpoint = load_checkpoint(workspace / "single1.ckpt")
    assert checkpoint.spec.name == "single1"
    assert checkpoint.spec.view_shape == TEST_VIEW_SHAPE
    assert checkpoint.config["class_names"] == ["Blip", "Power Line", "Violin Mode"]
    assert checkpoint.config["best_epoch"] == 1
    assert checkpoint.corpus_seed == 11
    log = (workspace / "single1.csv").read_text().splitlines()
    assert log[0] == "epoch,train_loss,validation_loss,validation_accuracy"
    assert len(log) == 2


def test_train_is_reproducible(workspace, tmp_path):
    output = run("train", "--data", str(workspace / "corpus"), "--model", "single1", "--epochs", "1", "--batch", "10",
                 "--out", str(tmp_path / "again.ckpt"))  # fmt: skip
    assert (tmp_path / "again.ckpt").read_bytes() == (workspace / "single1.ckpt").read_bytes()
    assert output == (workspace / "single1.csv").read_text()


def test_train_streams_the_log_while_training(workspace, tmp_path, monkeypatch):
    steps = []
    step = training.Adadelta.step

    def failing_step(self, params, grads):
        steps.append(1)
        if len(steps) > 2:  # 18 training samples in batches of 10: epoch 2 starts at step 3
            raise NumericError("Non-finite gradient for trunk.4.weights.")
        return step(self, params, grads)

    monkeypatch.setattr(training.Adadelta, "step", failing_step)
    with pytest.raises(CommandError, match="NumericError"):
        run("train", "--data", str(workspace / "corpus"), "--model", "single1", "--epochs", "2", "--batch", "10",
            "--out", str(tmp_path / "x.ckpt"), "--log", str(tmp_path / "log.csv"))  # fmt: skip
    log = (tmp_path / "log.csv").read_text().splitlines()
    assert log == (workspace / "single1.csv").read_text().splitlines()
    assert not (tmp_path / "x.ckpt").exists()


def test_train_unknown_model_lists_choices(workspace, tmp_path):
    with pytest.raises(CommandError, match="merged"):
        run("train", "--data", str(workspace / "corpus"), "--model", "triple", "--out", str(tmp_path / "x.ckpt"))


def test_train_missing_corpus(tmp_path):
    with pytest.raises(CommandError, match="CorpusIOError"):
        run("train", "--data", str(tmp_path / "nowhere"), "--model", "single0", "--out", str(tmp_path / "x.ckpt"))


# -- eval


def test_eval_reports(workspace):
    output = run("eval", "--ckpt", str(workspace / "single1.ckpt"), "--data", str(workspace / "corpus"))
    summary, per_class, confusion = output.split("\n\n")
    assert summary.splitlines()[1].startswith("overall_accuracy,")
    assert "samples,3" in summary
    assert per_class.splitlines()[1].startswith("Blip,short,1,")
    assert confusion.splitlines()[0] == "true\\predicted,Blip,Power Line,Violin Mode"


def test_eval_misclassified(workspace):
    output = run("eval", "--ckpt", str(workspace / "single1.ckpt"), "--data", str(workspace / "corpus"),
                 "--split", "validation", "--misclassified")  # fmt: skip
    assert "sample_id,true_class,predicted_class" in output


def test_eval_rejects_mismatched_checkpoint(workspace, tmp_path):
    arch = build(ModelSpec.from_name("single0", view_shape=TEST_VIEW_SHAPE, classes=4, filters=8, hidden=16))
    save_checkpoint(arch, tmp_path / "four.ckpt")
    with pytest.raises(CommandError, match="4 classes"):
        run("eval", "--ckpt", str(tmp_path / "four.ckpt"), "--data", str(workspace / "corpus"))


def test_eval_missing_checkpoint(workspace, tmp_path):
    with pytest.raises(CommandError):
        run("eval", "--ckpt", str(tmp_path / "missing.ckpt"), "--data", str(workspace / "corpus"))


# -- predict


def manifest_rows(workspace):
    return pd.read_csv(workspace / "corpus" / MANIFEST)


def test_predict_matches_in_memory_forward(workspace, glitch_corpus):
    rows = manifest_rows(workspace).iloc[[4, 0, 17]]
    args = []
    for _, row in rows.iterrows():
        args += ["--sample", *(str(workspace / "corpus" / row[column]) for column in VIEW_COLUMNS)]
    output = pd.read_csv(io.StringIO(run("predict", "--ckpt", str(workspace / "single1.ckpt"), *args)))

    assert list(output.columns) == ["sample", "predicted_class", "Blip", "Power Line", "Violin Mode"]
    assert [s.endswith(f"{sid}_0.5s.glv") for s, sid in zip(output["sample"], rows["sample_id"])] == [True] * 3
    arch = load_checkpoint(workspace / "single1.ckpt").architecture()
    by_id = {s.sample_id: s for s in glitch_corpus.samples}
    expected = arch.forward([by_id[sid] for sid in rows["sample_id"]])
    np.testing.assert_allclose(output[["Blip", "Power Line", "Violin Mode"]].to_numpy(), expected, atol=1e-6)
    names = np.array(["Blip", "Power Line", "Violin Mode"])
    assert output["predicted_class"].tolist() == names[expected.argmax(axis=1)].tolist()


def test_predict_single_view_file(workspace):
    row = manifest_rows(workspace).iloc[0]
    four = run("predict", "--ckpt", str(workspace / "single1.ckpt"),
               "--sample", *(str(workspace / "corpus" / row[column]) for column in VIEW_COLUMNS))  # fmt: skip
    one = run("predict", "--ckpt", str(workspace / "single1.ckpt"), "--sample", str(workspace / "corpus" / row[VIEW_COLUMNS[1]]))
    assert four.splitlines()[1].split(",")[1:] == one.splitlines()[1].split(",")[1:]


def test_predict_rejects_partial_samples(workspace):
    row = manifest_rows(workspace).iloc[0]
    with pytest.raises(CommandError, match="4 view files"):
        run("predict", "--ckpt", str(workspace / "single1.ckpt"),
            "--sample", *(str(workspace / "corpus" / row[column]) for column in VIEW_COLUMNS[:2]))  # fmt: skip



def test_predict_rejects_views_of_another_shape(workspace, tmp_path):
    row = manifest_rows(workspace).iloc[0]
    wrong = [tmp_path / f"wrong_{column}.glv" for column in VIEW_COLUMNS]
    for path in wrong:
        write_view(path, np.zeros((21, 24), dtype=np.float32))
    with pytest.raises(CommandError, match=r"CorpusIOError: .*wrong_.*expected 20x24"):
        run("predict", "--ckpt", str(workspace / "single1.ckpt"),
            "--sample", *(str(workspace / "corpus" / row[column]) for column in VIEW_COLUMNS),
            "--sample", *map(str, wrong))  # fmt: skip


# -- compare


def test_compare(workspace, tmp_path):
    parallel = build(ModelSpec.from_name("parallel", view_shape=TEST_VIEW_SHAPE, classes=3, filters=8, hidden=16))
    save_checkpoint(parallel, tmp_path / "parallel.ckpt")
    output = run("compare", "--data", str(workspace / "corpus"),
                 "--ckpt", str(workspace / "single1.ckpt"), str(tmp_path / "parallel.ckpt"))  # fmt: skip
    table, summary, rescued = output.split("\n\n")
    assert table.splitlines()[0] == "class,duration_category,single1,parallel"
    assert table.splitlines()[-1].startswith("overall,,")
    assert summary.splitlines()[0] == "model,category,mean_class_accuracy"
    assert {line.split(",")[0] for line in summary.splitlines()[1:]} == {"single1", "parallel"}
    assert rescued.splitlines()[0].startswith("rescued_by_multi_view,")
