#!/usr/bin/env python3
"""Plot the lowpass filter magnitude responses (sinc-Gaussian family and the
Lagrange half-shift family) over the resolvable wavenumber band."""

import numpy as np

from specshock.kernels import LAGRANGE, RSK, FilterSpec, halfshift_response, rsk_response

if __name__ == "__main__":
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    omegas = np.linspace(0.0, np.pi, 1025)
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))
    for ratio in (1.0, 1.5, 2.0, 2.5, 3.2, 5.0):
        left.plot(omegas / np.pi, rsk_response(FilterSpec(RSK, ratio=ratio), omegas),
                  label=f"r = {ratio}")
    left.set(title="sinc-Gaussian lowpass", xlabel=r"$\omega\Delta/\pi$",
             ylabel="magnitude response")
    left.legend(frameon=False)

    for order in (2, 4, 8, 16):
        right.plot(omegas / np.pi,
                   halfshift_response(FilterSpec(LAGRANGE, half_width=order), omegas),
                   label=f"{2 * order}-point")
    right.set(title="Lagrange half-shift lowpass", xlabel=r"$\omega\Delta/\pi$")
    right.legend(frameon=False)
    fig.tight_layout()
    fig.savefig("filter_responses.png", dpi=160)
    print("wrote filter_responses.png")
