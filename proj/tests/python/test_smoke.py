import math

import pytest

import qcsim

MINIMAL = """
material.lambda = 1
material.mu = 2
material.k0 = 0.5
material.k1 = 2
material.k2 = 1
material.k2p = 0.3
material.k3 = 0.1
material.k3p = 0.4
grid.dim = 2
grid.n = 5
initial.nu0 = mode(1,1,0,0.1,0,0)
initial.dot_u0 = mode(1,2,0,0,0.01,0)
solver.dt = 0.05
solver.t_end = 0.5
solver.krylov_tol = 1e-13
run.model = linear
"""


def coupled():
    p = qcsim.MaterialParams()
    p.lambda_, p.mu, p.k0 = 1.0, 2.0, 0.5
    p.k1, p.k2, p.k2p, p.k3, p.k3p = 2.0, 1.0, 0.3, 0.1, 0.4
    return p


def test_derived_coefficients():
    c = qcsim.derive_coefficients(coupled())
    assert c["xi"] == 3.0
    assert c["xibar"] == pytest.approx(0.3)
    assert c["zeta"] == pytest.approx(1.3)
    assert c["gamma"] == pytest.approx(2.7)
    assert c["kappa"] == pytest.approx(0.2)
    assert c["kappa0"] == 0.5


def test_admissibility_names_violations():
    ok, names = qcsim.check_admissibility(coupled(), "theorem_linear")
    assert ok and names == []
    p = coupled()
    p.mu = -1.0
    ok, names = qcsim.check_admissibility(p, "theorem_linear")
    assert not ok
    assert "mu>-lambda" in names
    with pytest.raises(ValueError):
        qcsim.check_admissibility(p, "bogus")
    assert qcsim.energy_form_min_eigenvalue(coupled()) > 0


def test_config_round_trip_and_errors():
    text = qcsim.canonical_config(MINIMAL)
    assert "material.rho = 1" in text
    assert qcsim.canonical_config(text) == text
    with pytest.raises(ValueError, match="material.muu"):
        qcsim.canonical_config(MINIMAL.replace("material.mu ", "material.muu "))


def test_run_closes_the_energy_ledger():
    r = qcsim.run(MINIMAL)
    assert r["step"] == list(range(11))
    assert max(r["balance_residual"]) <= 1e-10
    assert all(b <= a + 1e-15 for a, b in zip(r["E_total"], r["E_total"][1:]))
    assert r["bound_max_ratio"] <= 1.0


def test_gyro_power_vanishes():
    r = qcsim.run(MINIMAL, {"run.model": "gyro", "material.ell": "1", "solver.picard_tol": "1e-12"})
    for g, c, n in zip(r["gyro_power"][1:], r["curl_ut_norm"][1:], r["nut_norm"][1:]):
        assert abs(g) <= 1e-14 * c * n * n
    assert max(r["balance_residual"]) <= 1e-10


def test_scenarios(tmp_path):
    names = qcsim.scenario_names()
    assert "decoupled_diffusion" in names and len(names) == 6
    assert qcsim.scenario_config_text("nope") is None
    code, log = qcsim.run_scenario("nope", str(tmp_path / "x"))
    assert code == qcsim.EXIT_CONFIG
    code, log = qcsim.run_scenario("single_mode_wave", str(tmp_path / "wave"), {"solver.t_end": "0.2"})
    assert code == qcsim.EXIT_OK, log
    lines = (tmp_path / "wave" / "timeseries.csv").read_text().splitlines()
    assert lines[0].startswith("step,t,E_total")
    e = [float(l.split(",")[2]) for l in lines[1:]]
    assert len(e) == 21
    assert max(abs(x - e[0]) for x in e) <= 1e-10 * e[0]


def test_exit_codes(tmp_path):
    code, log = qcsim.run_scenario(
        "gyro_smallness", str(tmp_path / "g"), {"initial.dot_u0": "mode(1,2,0,0,0.5,0)"}
    )
    assert code == qcsim.EXIT_GATE
    assert "refusing to run" in log
    code, _ = qcsim.simulate(MINIMAL.replace("material.mu = 2", "material.mu = -1"), str(tmp_path / "bad"))
    assert code == qcsim.EXIT_GATE
    code, _ = qcsim.simulate(MINIMAL, str(tmp_path / "k"), {"solver.krylov_max": "1"})
    assert code == qcsim.EXIT_NUMERICAL
    code, _ = qcsim.simulate("material.mu = 1\n", str(tmp_path / "c"))
    assert code == qcsim.EXIT_CONFIG
    code, _ = qcsim.simulate(MINIMAL, str(tmp_path / "ok"))
    assert code == qcsim.EXIT_OK
    assert (tmp_path / "ok" / "snapshots" / "step_000010.txt").exists()


def test_determinism(tmp_path):
    outs = []
    for k in range(2):
        code, _ = qcsim.simulate(MINIMAL, str(tmp_path / f"r{k}"))
        assert code == qcsim.EXIT_OK
        outs.append(
            {p.relative_to(tmp_path / f"r{k}"): p.read_bytes() for p in (tmp_path / f"r{k}").rglob("*") if p.is_file()}
        )
    assert outs[0] == outs[1]


def test_numerical_failure_raises():
    with pytest.raises(qcsim.NumericalFailure):
        qcsim.run(MINIMAL, {"solver.krylov_max": "1"})
    r = qcsim.run(MINIMAL, {"solver.t_end": "0"})
    assert r["step"] == [0]
    assert math.isfinite(r["E_total"][0])
