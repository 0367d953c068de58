"""Walkthrough: packing layers into orthogonal groups and spreading power.

Six layers over four resource nodes (150% overload) leave room for three
orthogonal groups of two; ten layers over five nodes (200%) need two
residual layers carrying mixed operators.  Either way every resource node
ends up with each power/phase operator exactly once.
"""

import numpy as np

from scma_ntn import ConstellationOperator, SystemDims, assign_layers_and_power, validate_signature


def show(dims, rhos):
    ops = tuple(
        ConstellationOperator(rho=r, theta=t)
        for r, t in zip(rhos, np.linspace(0.0, np.pi * 0.9, len(rhos)))
    )
    sig = assign_layers_and_power(ops, dims)
    print(f"K={dims.k_resources} J={dims.j_users} N={dims.n_nonzero} (overload {dims.overload:.0%})")
    for row in sig.entries:
        print("   " + "  ".join(f"q{v}" if v else " ." for v in row))
    print(f"   groups: {sig.groups}  residual layers: {sig.residuals}")
    print(f"   column powers (ascending): {np.round(sig.column_powers(), 3)}")
    report = validate_signature(sig)
    print(f"   checks: balance={report.row_balance} orthogonal={report.group_orthogonality} "
          f"sorted={report.power_sorted}")
    print()


show(SystemDims(4, 6, 4, 2), (0.5, 0.75, 1.0))
show(SystemDims(5, 10, 4, 2), (0.4, 0.6, 0.8, 1.0))
show(SystemDims(6, 9, 4, 2), (0.5, 0.75, 1.0))
