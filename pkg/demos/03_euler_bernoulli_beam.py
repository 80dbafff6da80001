# Euler-Bernoulli beam: conservative pinned-pinned modes against the
# classical values, then a dissipative end with each admissible K0 class.

import numpy as np

from phnet import (assemble_generator, build_beam, certify_network_dissipative,
                   make_initial_state, simulate, spectrum)

# Pinned-pinned, rho = EI = 1: modes are +- i (k pi)^2 with sin(k pi z) shapes.
net = build_beam(left_bc="pinned", right_bc="pinned")
rep = spectrum(assemble_generator(net, 64))
print("pinned-pinned beam (conservative):")
print("  abscissa %.2e" % rep.abscissa)
for k in (1, 2, 3):
    err = np.min(np.abs(rep.eigenvalues - 1j * (k * np.pi) ** 2))
    print("  mode k=%d: i(k pi)^2 error %.2e" % (k, err))

# Dissipative end, first admissible class: K0 = diag(k0, 0) damps the
# angular velocity; clamped right end.
for k0, right in ((np.diag([1.0, 0.0]), "clamped"),
                  (np.array([[2.0, 0.5], [-0.5, 1.0]]), "pinned")):
    net = build_beam(left_bc=k0, right_bc=right)
    cert = certify_network_dissipative(net)
    gen = assemble_generator(net, 48)
    rep = spectrum(gen)
    x0 = make_initial_state(net, gen, "sine")
    trace = simulate(gen, x0, dt=1e-2, t_end=5.0)
    print("\nK0 =\n%s  right end: %s" % (k0, right))
    print("  certified dissipative: %s" % cert.passed)
    print("  abscissa %.4f" % rep.abscissa)
    print("  energy H(0) = %.4f -> H(5) = %.6f, monotone: %s"
          % (trace.energies[0], trace.energies[-1],
             bool(np.all(np.diff(trace.energies) <= 0))))
