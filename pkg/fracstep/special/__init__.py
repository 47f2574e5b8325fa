# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
from .mittag_leffler import MlParams, linear_mode_solution, mittag_leffler
