"""Tight wavelet frame filter banks from box-spline lowpass masks and vmr functions."""
from .trigring import (RationalTrigPoly, TrigPoly, along, tp_coset_sum, tp_dilate, tp_polyphase,
                       tp_restrict, tp_shift, tp_undilate, tp_vanishing_order)
from .lattice import DilationScheme, build_scheme, fourier_matrix
from .specfactor import (SosCertificate, arctan_equivalence_check, fejer_riesz,
                         verify_sos_certificate)
from .boxframe import (BoxSplineSpec, VmrFunction, boxspline_mask, build_vmr, check_s_conditions,
                       oblique_defect, s_table, subqmf_report, telescoping_sos)
from .oepkit import (AMatrix, MaskBank, build_amatrix, construct_highpass, moment_report,
                     subqmf_from_oep, verify_oep, vmr_admissible)
from .olp import PyramidEval, eval_pyramid, factorize_variant, verify_scaling_identity
from .fbtransform import PeriodicSignal, analyze, synthesize
from .pipeline import BuildConfig, build_bank, run_demo, verify_bank

__version__ = "0.1.0"
