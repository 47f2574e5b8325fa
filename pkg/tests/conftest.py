# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
import pytest

from fracstep.config import get_config


# reports and matrix dumps land in the test's temp dir
@pytest.fixture(autouse=True)
def go_to_tmpdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    yield


@pytest.fixture(autouse=True)
def restore_config():
    """Undo changes to the process-wide configuration made by a test."""
    config = get_config()
    saved = {key: config[key] for key in config}
    yield
    for key, value in saved.items():
        config[key] = value
