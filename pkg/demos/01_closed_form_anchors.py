"""
Closed-form anchors for the transfer function
=============================================

The average tomographic accuracy of a measurement, averaged over Haar-random
pure states, has exact values for the two most symmetric families: SIC
measurements give D*D + D - 2 and full MUB sets give D*D - 1.  This script
evaluates both through the library and lines them up with the reference
table.
"""

import numpy as np

from qttf import (
    build_basis,
    mub_povm,
    qttf_closed_minimal,
    qttf_closed_minimal_bases,
    reference_values,
    sic_povm,
)

print("dim  family  computed      reference")
for dim in (2, 3):
    basis = build_basis(dim)
    ref = reference_values(dim)

    sic = qttf_closed_minimal(sic_povm(dim), basis)
    mub = qttf_closed_minimal_bases(mub_povm(dim), basis)
    print(f"{dim:>3}  SIC     {sic.value:<12.6f}  {ref.sic:.6f}")
    print(f"{dim:>3}  MUB     {mub.value:<12.6f}  {ref.mub:.6f}")

    # The zeroth-order bound (D+1)(D*D-1)/D sits above both anchors: it is
    # the accuracy at the maximally mixed state, where estimation is hardest.
    print(f"{dim:>3}  bound   {ref.zeroth_bound:<12.6f}  (maximally mixed state)")

# The closed forms carry no sampling error, so both estimates report a zero
# standard error and a params dict naming the structure they used.
estimate = qttf_closed_minimal(sic_povm(3), build_basis(3))
print("\nmethod:", estimate.method)
print("std_error:", estimate.std_error)
print("deviation of Y from the minimal structure:", f"{estimate.params['y_deviation']:.2e}")

# Reference values extend to any dimension without constructing a
# measurement; the large-D limits approach 2(D-1) per unit of D.
print("\ndim   sic    mub    mub/sic")
for dim in (2, 3, 5, 8, 13):
    ref = reference_values(dim)
    print(f"{dim:>3}  {ref.sic:>6.1f} {ref.mub:>6.1f}   {ref.mub / ref.sic:.4f}")

assert abs(qttf_closed_minimal(sic_povm(2), build_basis(2)).value - 4.0) < 1e-12
assert abs(qttf_closed_minimal_bases(mub_povm(3), build_basis(3)).value - 8.0) < 1e-12
print("\nanchors reproduced exactly")
