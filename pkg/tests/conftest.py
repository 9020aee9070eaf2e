from __future__ import annotations

from pathlib import Path

import pytest

from synth import TOY_TEST_ROWS, TOY_TRAIN_ROWS, write_tsv


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        print(f"[acceptance] {status} {report.nodeid.split('::')[-1]}")


@pytest.fixture
def toy_dataset_files(tmp_path: Path) -> tuple[Path, Path]:
    train = write_tsv(tmp_path / "train.tsv", TOY_TRAIN_ROWS)
    test = write_tsv(tmp_path / "test.tsv", TOY_TEST_ROWS)
    return train, test
