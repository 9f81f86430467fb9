"""Unit tests for config module."""

from pathlib import Path
from unittest.mock import patch

from augmented_krylov.config import (
    CSV_COLUMNS,
    DEFAULT_DISCONTINUITY,
    MISLOCATED_DISCONTINUITY,
    get_log_file_path,
)


def test_get_log_file_path(tmp_path):
    """Test that get_log_file_path returns correct log file path."""
    with patch("augmented_krylov.config.get_log_dir", return_value=tmp_path):
        log_path = get_log_file_path()
        assert tmp_path == Path(log_path).parent
        assert "augkrylov.log" in log_path


def test_history_columns():
    assert CSV_COLUMNS == ("iteration", "residual_estimate", "true_residual", "relative_error")


def test_mislocated_jump_lies_right_of_default():
    """Test that the mislocated discontinuity sits right of the default."""
    assert 0.0 < DEFAULT_DISCONTINUITY < MISLOCATED_DISCONTINUITY < 1.0
