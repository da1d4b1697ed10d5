"""LCU 1-norm estimation for molecular electronic-structure Hamiltonians."""

from .errors import NumericalError, ParseError
from .fragments import (
    CsaFragment,
    DfFragment,
    OrbitalRotation,
    csa_greedy,
    double_factorize,
    fragment_lambda_matrix,
    fragment_tensor,
    fragments_from_json,
    fragments_to_json,
    lambda_complete_square,
    lambda_fermionic,
    lambda_sqrt_fragment,
    make_rotation,
    reflection_term_count,
    rotate_tensors,
    theta_dim,
)
from .grouping import AcGroup, AcPartition, group_unitary, lambda_ac, sorted_insertion
from .optimize import OptimizerConfig, minimize, oo_ac, oo_pauli
from .pauli import (
    MajoranaPolynomial,
    PauliPolynomial,
    PauliWord,
    anticommutes,
    jordan_wigner,
    lambda_pauli,
    lambda_pauli_closed_form,
    majorana_separate,
    majorana_to_pauli,
)
from .picture import PictureSplit, residual_report, split_interaction
from .pipeline import METHOD_ORDER, NormReport, emit_table, run_pipeline
from .spectra import (
    FockOperator,
    SpectralRange,
    minimal_lcu,
    sector_spectrum,
    spectral_range,
)
from .symshift import (
    L1Problem,
    SymmetryShift,
    apply_shift,
    optimize_shift,
    shift_one_body,
    shift_two_body,
    solve_l1,
    weighted_median,
)
from .tensors import (
    FIXTURE_NAMES,
    FcidumpRecord,
    SpatialTensors,
    SpinTensor2e,
    absorb_one_body,
    fixture_path,
    load_fcidump,
    load_fixture,
    one_body_adjust,
    parse_fcidump,
    to_chemist,
    write_fcidump,
)

__version__ = "0.1.0"
