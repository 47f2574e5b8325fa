# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
from .decorators import exit_on_error
from .utils import format_float, get_stdout_logger, read_csv, write_csv
