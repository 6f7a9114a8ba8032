"""Smoke tests for the Python bindings (run by ctest as `python_smoke`)."""

import math
import sys


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    import kpsh

    # Spectral basics.
    m = [[3, 0, 0], [0, -1, 0], [0, 0, 2]]
    assert kpsh.eigenvalues(m) == [-1.0, 2.0, 3.0]
    approx(kpsh.psh_margin(m, 2), 1.0)
    assert kpsh.is_strongly_q_convex(m, 2)
    approx(kpsh.kyfan_min_trace(m, 2), 1.0, 1e-8)

    # Complex Hermitian input and the frame-trace oracle.
    h = [[2, 1j], [-1j, 2]]
    ev = kpsh.eigenvalues(h)
    approx(ev[0], 1.0)
    approx(ev[1], 3.0)
    approx(kpsh.kyfan_min_trace(h, 1), 1.0, 1e-8)

    # Cone tests on nu ^ omega^k: exact closed-form path.
    eta = kpsh.nu_wedge_omega_k_json([[1, 0, 0], [0, 2, 0], [0, 0, -0.5]], 1)
    weak = kpsh.weak_positivity_test(eta)
    approx(weak["margin"], 0.5)  # 1! * (smallest two eigenvalues: -0.5 + 1)
    assert weak["positive"] and weak["grade"] == "exact"
    strong = kpsh.strong_positivity_certificate(eta)
    assert strong["positive"]

    # Restriction of omega to a coordinate line has unit density.
    omega = kpsh.omega_std_json(2)
    approx(kpsh.restrict_complex(omega, [[1, 0]]), 1.0)

    # Grid calculus: dd^c of |z|^2 is 2*Id, margin 2.
    d = kpsh.GridDomain(1, [17, 17], [0.125, 0.125], [-1.0, -1.0])
    f = kpsh.ScalarField.sample(d, lambda x: x[0] * x[0] + x[1] * x[1])
    approx(kpsh.psh_margin_field_min(f, 1), 2.0, 1e-10)
    approx(kpsh.ddc_at(f, [8, 8])[0][0].real, 2.0, 1e-10)

    # Heat flow on the torus damps the k=1 mode by exp(-t).
    period = 2 * math.pi
    dt = kpsh.GridDomain(1, [32, 32], [period / 32] * 2, [0.0, 0.0], "torus")
    g = kpsh.ScalarField.sample(dt, lambda x: math.cos(x[0]))
    t = 0.25
    sm = kpsh.heat_smooth(g, t)
    approx(sm.values[0], math.exp(-t), 1e-12)

    # Regularized max: exact branch outside the band, smooth inside.
    assert kpsh.regularized_max(3.0, 1.0, 0.5) == 3.0
    approx(kpsh.regularized_max(1.0, 1.0, 0.5), 1.0 + 3 * 0.5 / 16)

    print("python smoke: all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
