"""Split a Hamiltonian into a mean-field part plus residual and show how
much smaller every decomposition's 1-norm becomes on the residual.

Run:  python demos/interaction_picture.py [molecule]   (default lih)
"""

import sys

import numpy as np

from lcunorm import (
    emit_table,
    load_fixture,
    run_pipeline,
    split_interaction,
    to_chemist,
)

molecule = sys.argv[1] if len(sys.argv) > 1 else "lih"
t = to_chemist(load_fixture(molecule))

split = split_interaction(t)
obt0, tbt0 = split.h0_tensors()
print(f"{molecule}: mean-field misfit {split.fit_residual_norm:.4f}")
print(f"residual two-body Frobenius norm: {np.linalg.norm(split.residual.tbt.ravel()):.4f}")
print(f"original two-body Frobenius norm: {np.linalg.norm(t.tbt.ravel()):.4f}\n")

full = run_pipeline(molecule)
resid = run_pipeline(molecule, picture="interaction")
print(emit_table([full, resid], fmt="text"))
print()
for m in full.methods:
    a, b = full.methods[m]["lambda"], resid.methods[m]["lambda"]
    print(f"  {m:9s} {a:8.3f} -> {b:7.3f}   ({100 * (1 - b / a):.0f}% lower)")
