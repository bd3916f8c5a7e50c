"""Desk-scale laboratory for verification games over quantum sampling experiments.

Exact statevector simulation produces "quantum" sample batches, classical
spoofers try to imitate them, and distinguishers estimate how verifiable the
gap is.  Side modules check the statistical facts the games lean on: trace
distance vs. total variation distance for dephased states, Haar outcome
collision bounds, brute-force micro-sampler search, and a designated-verifier
proof-of-quantumness protocol built on a squaring trapdoor function.
"""

__version__ = "0.1.0"
