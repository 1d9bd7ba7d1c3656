"""Numerical tolerance constants, collected in one place."""

# Hermiticity of Hamiltonians supplied to propagators / system specs.
HERMITIAN_TOL = 1e-10

# Unitarity of a single computed propagator, ||U^†U - I||_F.
UNITARY_TOL = 1e-10

# Unitarity of an N-slice total propagator (roundoff accumulates).
TOTAL_UNITARY_TOL = 1e-9

# Trace normalization required of density matrices.
DENSITY_TRACE_TOL = 1e-8

# Eigenvalue floor below which a density matrix counts as non-positive.
DENSITY_EIG_FLOOR = -1e-9

# Imaginary residue tolerated when reading off Bloch components.
BLOCH_IMAG_TOL = 1e-10

# Bloch-vector norm overshoot tolerated for pure states.
BLOCH_NORM_TOL = 1e-9

# Slice Hamiltonians with Frobenius norm below this are treated as degenerate
# by the energy gradient (the norm is not differentiable at zero).
DEGENERATE_SLICE_NORM = 1e-12
