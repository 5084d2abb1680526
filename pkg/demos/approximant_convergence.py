"""How fast does the rational approximant of the Bose function converge?

The approximant order N controls how many purely decaying terms the
analytic response-function series carries.  This script tabulates the
sup-norm error of the order-N approximant against the exact function
1/(1 - exp(-x)) on a symmetric grid, showing the rapid convergence that
makes small N sufficient in practice.
"""

import numpy as np

from bathkit import ThermalContext, bose_einstein, pade_parameters
from bathkit.pade import pade_bose_approx

ctx = ThermalContext(beta=1.0)

x = np.linspace(-20.0, 20.0, 801)
x = x[x != 0.0]

print("order N    sup error on [-20, 20]")
for N in (1, 2, 4, 7, 10, 14):
    params = pade_parameters(N, "be", ctx)
    err = max(abs(pade_bose_approx(xi, params) - bose_einstein(xi))
              for xi in x)
    print(f"{N:7d}    {err:.3e}")

# the order-1 parameters are analytic: rate 2*sqrt(15), weight 5/2
params = pade_parameters(1, "be", ctx)
print()
print("order-1 rate ", params.xi[0], " (analytic:", 2 * np.sqrt(15.0), ")")
print("order-1 weight", params.Xi[0], " (analytic: 2.5)")
