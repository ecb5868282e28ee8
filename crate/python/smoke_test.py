"""Smoke test for the gpdephase extension module.

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import json
import math

import gpdephase as gd


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    close(gd.gamma(5.0), 24.0, 1e-12)

    env = gd.Environment.thermal(0.1, 1.0, cutoff=10.0)
    for t in (0.1, 1.0, 2.5):
        close(env.decoherence(t), 0.2 * math.log1p(100.0 * t * t), 1e-12)
    assert env.markovianity(10.0)["markovian"]

    s4 = gd.Environment.thermal(0.1, 4.0)
    report = s4.markovianity(10.0)
    assert not report["markovian"]
    close(report["first_crossing"], 0.1, 1e-6)

    memory = gd.Environment.noneq(0.1, 1.0, lam=0.3, d=2.0)
    assert not memory.markovianity(3.0)["markovian"]

    rho = gd.reduced_density(math.pi / 3, 0.2, 1.0)
    close((rho[0][0] + rho[1][1]).real, 1.0, 1e-15)
    pairs = gd.eigensystem(rho)
    close(sum(v for v, _ in pairs), 1.0, 1e-12)

    for theta in (math.pi / 6, math.pi / 3, math.pi / 2):
        r = gd.gp_evaluate(gd.Environment.thermal(0.0, 3.0), theta)
        close(r.phi_g, gd.gp_unitary(theta), 1e-6)

    r = gd.gp_evaluate(gd.Environment.thermal(0.01, 3.0), math.pi / 3)
    assert r.richardson_gap < 1e-6
    close(r.delta_phi, r.phi_g - r.phi_u, 1e-15)

    table = gd.gp_vs_s("thermal", [1.0, 3.0], [0.001, 0.01], math.pi / 3)
    assert len(table) == 4 and table.axes[0][0] == "gamma0"
    assert table.metadata["environment"] == "thermal"
    again = gd.SweepTable.from_csv(table.to_csv())
    assert again.values == table.values
    assert json.loads(table.to_json())["format"] == "gpdephase-table"

    dmap = gd.diffusion_map("noneq", [1.0, 2.0], t_count=10)
    assert min(dmap.column("D")) < 0.0

    try:
        gd.Environment.thermal(0.1, -1.5)
    except gd.GpdephaseError as e:
        assert "s" in str(e)
    else:
        raise AssertionError("s <= -1 accepted")

    print(f"gpdephase {gd.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
