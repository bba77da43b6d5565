"""Smoke test for the qbattery_py extension.

Build and install first:
    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/qbattery_py-*.whl
"""

import cmath
import math
import sys
import tempfile

import qbattery_py as qb


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    print("qbattery_py", qb.__version__)

    names = [name for name, _ in qb.list_presets()]
    assert len(names) == 7, names
    assert qb.validate("fig2_dephasing_product") == 10

    # |+> is the most excited single-cell state of (h/2) sigma^x
    plus = [[0.5, 0.5], [0.5, 0.5]]
    field = [[0.0, 0.5], [0.5, 0.0]]
    w, passive, erg = qb.ergotropy(plus, field)
    assert close(erg, 1.0, 1e-12), (w, passive, erg)
    assert close(qb.coherence_l1(plus, field), 0.0, 1e-12)

    rho = qb.local_ad_state(0.2, 3.0)
    assert close(rho[0][0].real, 0.5 * math.exp(-0.6), 1e-14)

    eig = qb.gamma_nn_eigenvalues(0.2, cmath.rect(0.01, math.pi / 3), 6)
    assert len(eig) == 6 and min(eig) > 0

    state = qb.correlated_dephasing_state(1.0, 0.2, 0.01, math.pi / 3, 1.0, 0.5)
    assert close(sum(state[i][i].real for i in range(4)), 1.0, 1e-12)

    runs = qb.simulate('preset = "fig5_ad_product"\nn_sites = [2]\nt_max = 1.0\ndt_sample = 0.1')
    assert len(runs) == 2
    for r in runs:
        assert len(r["t"]) == 11 and r["ratio_R"][0] is None
        print(r["channel"], r["topology"], "N=%d" % r["n_sites"], "E(t=1) = %.6f" % r["ergotropy"][-1])

    try:
        qb.validate('preset = "fig7_longrange_comparison"\nn_sites = [4]\ngamma_offdiag_modulus = 0.15')
    except qb.QBatteryError as e:
        assert e.args[1] == 3, e.args
    else:
        raise AssertionError("CPTP violation not reported")

    with tempfile.TemporaryDirectory() as out:
        paths = qb.run('preset = "fig2_dephasing_product"\nn_sites = [2]\nt_max = 0.5', out)
        assert len(paths["csv"]) == 2

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
