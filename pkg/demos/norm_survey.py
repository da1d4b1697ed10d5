"""Survey every decomposition's 1-norm on one molecule, with and without
the symmetry shift, and print the aligned comparison table.

Run:  python demos/norm_survey.py [molecule]   (default lih)
"""

import sys

from lcunorm import emit_table, run_pipeline

molecule = sys.argv[1] if len(sys.argv) > 1 else "lih"

print(f"computing all decompositions for {molecule} ...")
plain = run_pipeline(molecule)
shifted = run_pipeline(molecule, shift=True)

print()
print(emit_table([plain, shifted], fmt="text"))
print("each cell is: 1-norm (ceil log2 of the unitary count)")
print()

de2 = plain.methods["de2"]["lambda"]
best = min(
    (e["lambda"], m) for m, e in shifted.methods.items() if m != "de2"
)
print(f"spectral lower bound        : {de2:.4f}")
print(f"best shifted decomposition  : {best[1]} at {best[0]:.4f}")
print(f"shift parameters            : s1 = {shifted.s1:.6f}, s2 = {shifted.s2:.6f}")
