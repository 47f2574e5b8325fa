# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
from .rhs import SemilinearRhs
from .stepper import CqStepper, StepperConfig, Trajectory, history_term, run, step
