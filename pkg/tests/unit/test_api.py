import numpy as np
import pandas as pd
import pytest

from src.api import (
    COMPARE_NAME,
    DATA_NAME,
    DIRECT_NAME,
    KS_TABLE_NAME,
    TRUTH_NAME,
    compare_archives,
    desk_scale_data,
    fit_dynamic,
    fit_static,
    generate_periodic_dataset,
    summarize_archive,
    validate_iw,
)
from src.io.tensors import read_trial_tensor
from src.model.dto.archive import ArchiveKind
from src.model.dto.experiment import ExperimentConfig, PriorKind
from src.io.archive import read_archive
from src.models.periodic import generate_periodic
from src.utils.errors import TooFewSamplesError

SMALL = {"iterations": 130, "burn_in": 30, "thin": 1, "t_max": 15, "adapt_fraction": 0.2}


@pytest.fixture
def periodic_dir(tmp_path):
    config = ExperimentConfig(dim=2, trials=3, times=6, seed=4)
    generate_periodic_dataset(config, tmp_path / "periodic")
    return tmp_path / "periodic"


def test_generated_files_match_the_in_memory_draw(periodic_dir):
    tensor = read_trial_tensor(periodic_dir / DATA_NAME)
    rng = np.random.default_rng(np.random.SeedSequence(4).spawn(1)[0])
    expected, truth = generate_periodic(2, 3, 6, (0.0, 2.0), rng)
    np.testing.assert_array_equal(tensor.values, expected.values)
    truth_frame = pd.read_csv(periodic_dir / TRUTH_NAME)
    assert (truth_frame.loc[0, ["mean_c1", "mean_c2"]] == 0.0).all()


def test_desk_scale_data_shape():
    tensor = desk_scale_data(ExperimentConfig(dim=3, n_obs=20))
    assert tensor.shape == (1, 20, 3)


def test_fit_static_writes_an_archive_per_chain(tmp_path):
    config = ExperimentConfig(chains=2, prior=PriorKind.SQDIR, dim=3, **SMALL)
    reports = fit_static(config, tmp_path)
    assert [report.chain_id for report in reports] == [0, 1]
    manifest, chains, _ = read_archive(tmp_path)
    assert manifest.kind is ArchiveKind.STATIC
    assert chains[0].samples["corr"].shape == (100, 1, 3)
    assert (tmp_path / "summary_corr.csv").exists()


def test_worker_processes_reproduce_serial_chains(tmp_path):
    settings = {"chains": 2, "prior": PriorKind.VMF, "dim": 2, **SMALL}
    fit_static(ExperimentConfig(workers=1, **settings), tmp_path / "serial")
    fit_static(ExperimentConfig(workers=2, **settings), tmp_path / "pool")
    _, serial_chains, _ = read_archive(tmp_path / "serial")
    _, pool_chains, _ = read_archive(tmp_path / "pool")
    for left, right in zip(serial_chains, pool_chains):
        np.testing.assert_array_equal(left.samples["cov"], right.samples["cov"])


def test_validate_iw_reports_every_covariance_entry(tmp_path):
    report = validate_iw(ExperimentConfig(dim=3, ks_threshold=1.0, **SMALL), tmp_path)
    assert list(report.table["entry"]) == ["s1_1", "s2_1", "s2_2", "s3_1", "s3_2", "s3_3"]
    assert report.passed
    assert (tmp_path / KS_TABLE_NAME).exists()
    assert len(pd.read_csv(tmp_path / DIRECT_NAME)) == 100


def test_dynamic_fit_summary_and_self_comparison(periodic_dir, tmp_path):
    config = ExperimentConfig(band=2, **SMALL)
    out = tmp_path / "dynamic"
    reports = fit_dynamic(config, periodic_dir / DATA_NAME, out, periodic_dir / TRUTH_NAME)
    assert reports[0].retained == 100
    metrics = pd.read_csv(out / "summary_metrics.csv")
    assert set(metrics["process"]) == {"mean", "sd", "corr", "cov"}
    assert len(pd.read_csv(out / "summary_errors.csv")) == 6

    paths = summarize_archive(out)
    assert "summary_metrics.csv" not in [path.name for path in paths]

    frame = pd.read_csv(compare_archives(out, out, tmp_path / COMPARE_NAME))
    assert len(frame) == 6
    np.testing.assert_allclose(frame["frobenius_of_means"], 0.0, atol=1e-12)


def test_short_dynamic_run_skips_summaries(periodic_dir, tmp_path):
    config = ExperimentConfig(iterations=12, burn_in=4, thin=2, t_max=10)
    out = tmp_path / "short"
    fit_dynamic(config, periodic_dir / DATA_NAME, out)
    assert not list(out.glob("summary_*.csv"))
    with pytest.raises(TooFewSamplesError):
        summarize_archive(out)
