import math

import numpy as np
import pytest

import twomode


def base(**kw):
    cfg = {
        "scheme": "SMSC",
        "atomic": "EG",
        "field": {"type": "Vacuum"},
        "cutoff": 6,
        "time": {"t_max": 3.0, "samples": 31},
    }
    cfg.update(kw)
    return cfg


def test_bell_state_measures():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    rho = np.outer(psi, psi.conj())
    assert twomode.concurrence(rho) == pytest.approx(1.0, abs=1e-12)
    assert twomode.eof(1.0) == pytest.approx(1.0, abs=1e-12)
    assert twomode.negativity_atoms(rho) == pytest.approx(0.5, abs=1e-12)
    prod = np.zeros((4, 4), dtype=complex)
    prod[1, 1] = 1.0
    assert twomode.concurrence(prod) == pytest.approx(0.0, abs=1e-14)


def test_normalize_fills_defaults():
    cfg = twomode.normalize_config(base())
    assert cfg["scheme"] == "SMSC"
    assert "tolerances" in cfg and "measures" in cfg
    assert twomode.normalize_config(cfg) == cfg


def test_simulate_single_excitation():
    r = twomode.simulate(base())
    cols = r["columns"]
    assert cols[0] == "t" and "concurrence" in cols
    data = r["data"]
    assert data.shape == (31, len(cols))
    t = data[:, 0]
    c = data[:, cols.index("concurrence")]
    np.testing.assert_allclose(c, 0.5 * np.sin(2 * t) ** 2, atol=1e-12)
    assert r["classification"] is None
    assert r["csv"].splitlines()[0] == ",".join(cols)


def test_propagators_are_unitary_on_exact_blocks():
    u = twomode.propagator_smsc(0.7, 1.0, 5)
    assert u.shape == (20, 20)
    h = twomode.hamiltonian("SMSC", 1.0, 5)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-14)
    # the |gg>|0> column is an exact stationary state
    col = u[:, 15]
    assert abs(abs(col[15]) - 1.0) < 1e-14


def test_config_errors_raise_value_error():
    with pytest.raises(ValueError):
        twomode.simulate(base(scheme="XYZ"))
    with pytest.raises(ValueError):
        twomode.simulate(base(unknown_key=1))


def test_sweep_and_verify():
    cfg = base(
        scheme="SMSC",
        atomic="EE",
        field={"type": "Thermal", "nbar": {"sweep": {"values": [0.3, 0.6]}}},
        cutoff=0,
        time={"t_max": 6.0, "samples": 601},
    )
    param, rows = twomode.sweep(cfg)
    assert param == "field.nbar"
    assert [r["value"] for r in rows] == [0.3, 0.6]
    assert all(r["valid"] for r in rows)
    rep = twomode.verify(
        {
            "scheme": "TMAC",
            "atomic": "EG",
            "field": {"type": "FockPair", "n": 1, "m": 0},
            "cutoff": 6,
            "time": {"t_max": 5.0, "samples": 51},
        }
    )
    assert rep["pass"] and rep["max_trace_distance"] < 1e-8


def test_small_squeezing_negativities_vanish_at_zero():
    na, nf = twomode.small_squeezing_negativities(0.02, 0.0)
    assert na == pytest.approx(0.0, abs=1e-12)


def test_truncation_error_is_raised():
    cfg = base(scheme="SMSC", atomic="EE", field={"type": "Thermal", "nbar": 3.0}, cutoff=5)
    with pytest.raises(twomode.TruncationError):
        twomode.simulate(cfg)
