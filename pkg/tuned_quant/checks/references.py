"""Citation catalogue for the check suite.

Each check cites exactly one entry. ``docs/identities.md`` states every
entry in words, keyed the same way.
"""

REFERENCES: dict[str, str] = {
    # Poisson structure and the canonical vector fields
    "P.1": "canonical Poisson brackets",
    "P.2": "Poisson bracket antisymmetry",
    "P.3": "Poisson bracket Jacobi identity",
    "P.4": "Hamiltonian field Leibniz rule",
    "P.5": "bracket / Hamiltonian field compatibility",
    "P.6": "tautological field Euler property",
    "P.7": "Hamiltonian fields of L3 and H_SHO",
    # Kostant-Souriau prequantization
    "K.1": "Kostant-Souriau map / position",
    "K.2": "Kostant-Souriau map / momentum",
    "K.3": "Kostant-Souriau map / angular momentum",
    "K.4": "Kostant-Souriau map / harmonic oscillator",
    "K.5": "Kostant-Souriau map / bracket homomorphism",
    # Vertical polarization
    "V.1": "vertical polarization / restricted KS position",
    "V.2": "vertical polarization / KS oscillator leaves the polarized states",
    "V.3": "vertical polarization / second tuned map preserves it",
    "V.4": "vertical polarization / restricted TT2 angular momentum",
    # Tuned maps
    "T.1": "tuning indicator / worked values",
    "T.2": "first tuned map / position",
    "T.3": "first tuned map / momentum",
    "T.4": "first tuned map / angular momentum",
    "T.5": "first tuned map / harmonic oscillator",
    "T.6": "second tuned map / position",
    "T.7": "second tuned map / momentum",
    "T.8": "second tuned map / angular momentum",
    "T.9": "second tuned map / harmonic oscillator",
    "T.10": "second tuned map / angular momentum commutators",
    "T.11": "second tuned map / free particle commutator",
    "T.12": "second tuned map / isotropic oscillator commutator",
    "T.13": "second tuned map / canonical pairs",
    # Chart changes
    "C.1": "tautological field / chart invariance",
    "C.2": "tautological field / squared diagram",
    "C.3": "cotangent lift / operator transport",
    "C.4": "Kostant-Souriau map / chart independence",
    "C.5": "first tuned map / chart independence",
    "C.6": "second tuned map / rotations",
    "C.7": "second tuned map / shear",
    "C.8": "canonical map / chart dependence",
    # Polarized spectrum
    "S.1": "polarized coefficients of the tuned oscillator",
    "S.2": "second tuned map / oscillator spectrum",
    "S.3": "oscillator spectrum / convergence order",
    "S.4": "oscillator spectrum / eigenvectors",
    "S.5": "metric norm on configuration space",
    "S.6": "phase-space volume norm",
    # Command-line examples
    "X.1": "quantize example / tuned oscillator",
    "X.2": "quantize example / KS position",
    "X.3": "commute example / angular momentum",
}


def cite(key: str) -> str:
    """``"T.10 second tuned map / angular momentum commutators"``; unknown keys raise KeyError."""
    return f"{key} {REFERENCES[key]}"
