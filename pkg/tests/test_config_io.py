import math

import numpy as np
import pytest

from fnslab.config import (
    CONFIG_KEYS,
    ExperimentConfig,
    format_config,
    load_config,
    parse_config,
    save_config,
)
from fnslab.lattice import Lattice
from fnslab.snapshots import MAGIC, read_snapshot, write_snapshot
from fnslab.spectral import FractionalParams, random_solenoidal_field


def test_parse_config_roundtrip(tmp_path):
    cfg = ExperimentConfig(r=3, beta=0.42, K_override=4, dt="cfl",
                           p=math.inf, outdir="results", seed=7)
    path = tmp_path / "exp.cfg"
    save_config(path, cfg)
    assert load_config(path) == cfg


def test_parse_config_values():
    text = """
    # comment line
    alpha = 1.25
    r = 3
    p = inf
    dt = 0.001
    t_final_override = 0.2
    outdir = out/run1
    """
    cfg = parse_config(text)
    assert cfg.alpha == 1.25
    assert cfg.r == 3
    assert math.isinf(cfg.p)
    assert cfg.dt == 0.001
    assert cfg.t_final_override == 0.2
    assert cfg.outdir == "out/run1"


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ValueError, match="unknown key"):
        parse_config("viscosity = 2\n")


def test_parse_config_rejects_garbage():
    with pytest.raises(ValueError, match="key=value"):
        parse_config("alpha 1.0\n")


def test_empty_values_mean_defaults():
    cfg = parse_config("gamma =\nzeta =\nK_override =\n")
    assert cfg == ExperimentConfig()


def test_format_lists_every_key():
    text = format_config(ExperimentConfig())
    for key in CONFIG_KEYS:
        assert any(line.startswith(f"{key} =") for line in text.splitlines())


def test_auto_lattice_covers_interactions():
    cfg = ExperimentConfig(r=4, K_override=4)
    lat = cfg.lattice()
    kmax = cfg.inflation().wave_magnitudes[-1]
    assert lat.in_dealias_band((2 * kmax, 0, 1))


def test_quad_split():
    assert ExperimentConfig(quad_nodes=64).quad_split() == (8, 8)
    assert ExperimentConfig(quad_nodes=128).quad_split() == (8, 16)


# ---------------------------------------------------------------------------
# snapshot files


def test_snapshot_roundtrip(tmp_path):
    lat = Lattice((12, 1, 8))
    field = random_solenoidal_field(lat, seed=3)
    params = FractionalParams(alpha=1.25, nu=1.0)
    path = tmp_path / "snap.sfl"
    write_snapshot(path, field, params, t=0.125)
    back, p2, t2 = read_snapshot(path)
    assert t2 == 0.125
    assert p2 == params
    assert back.lattice == lat
    assert np.array_equal(back.coeffs, field.coeffs)


def test_snapshot_layout_is_stable(tmp_path):
    from fnslab.lattice import SpectralField

    lat = Lattice((2, 1, 2))
    f = SpectralField.zeros(lat)
    f.coeffs[0, 0, 0, 0] = 1.0 + 2.0j
    path = tmp_path / "snap.sfl"
    write_snapshot(path, f, FractionalParams(), t=0.5)
    raw = path.read_bytes()
    assert raw[:4] == MAGIC
    import struct

    ver, n1, n2, n3 = struct.unpack_from("<IIII", raw, 4)
    assert (ver, n1, n2, n3) == (1, 2, 1, 2)
    alpha, nu, t, frac = struct.unpack_from("<dddd", raw, 20)
    assert (alpha, nu, t) == (1.0, 1.0, 0.5)
    assert frac == pytest.approx(2.0 / 3.0)
    # first coefficient: little-endian (re, im) float64 pair
    re, im = struct.unpack_from("<dd", raw, 56)
    assert (re, im) == (1.0, 2.0)


def test_snapshot_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.sfl"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError, match="magic"):
        read_snapshot(path)
