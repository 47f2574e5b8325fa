# Copyright The fracstep Authors. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0
from .cq_kernel import (
    BdfDelta,
    CorrectionSet,
    CqWeights,
    bdf_delta_coeffs,
    correction_coeffs,
    cq_weights,
    cq_weights_fft,
)
