import numpy as np
import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from genricci import config as cfgmod
from genricci import sugra as sg
from genricci.errors import ConfigError


class TestAlgebraTables:
    def test_simple_types(self):
        assert cfgmod.parse_algebra({"type": "so", "p": 3, "q": 0}).algebra.dim == 3
        assert cfgmod.parse_algebra({"type": "su", "n": 3}).algebra.dim == 8
        assert cfgmod.parse_algebra({"type": "abelian", "dim": 2}).algebra.dim == 2

    def test_double_with_split(self):
        parsed = cfgmod.parse_algebra({
            "type": "double", "c": -1.0,
            "base": {"type": "su", "n": 2, "lambda": -1.0, "involution": "u1_block"}})
        assert parsed.dbl is not None and parsed.algebra.dim == 6
        assert parsed.split is not None

    def test_sum(self):
        parsed = cfgmod.parse_algebra({
            "type": "sum",
            "blocks": [{"type": "su", "n": 2}, {"type": "abelian", "dim": 1}]})
        assert parsed.algebra.dim == 4

    def test_raw(self):
        parsed = cfgmod.parse_algebra({
            "type": "raw", "metric": [[0.0, 1.0], [1.0, 0.0]],
            "structure": np.zeros((2, 2, 2)).tolist()})
        assert parsed.algebra.dim == 2

    def test_unknown_type(self):
        with pytest.raises(ConfigError):
            cfgmod.parse_algebra({"type": "sp"})

    def test_unknown_involution(self):
        with pytest.raises(ConfigError):
            cfgmod.parse_algebra({"type": "su", "n": 2, "involution": "bogus"})

    def test_toml_round_trip(self):
        spec = {"type": "double", "c": 0.5,
                "base": {"type": "su", "n": 2, "lambda": -1.0,
                         "involution": "u1_block"}}
        text = cfgmod.algebra_to_toml(spec)
        back = tomllib.loads(text)["algebra"]
        assert back == spec
        assert (cfgmod.parse_algebra(back).algebra.dim
                == cfgmod.parse_algebra(spec).algebra.dim)

    def test_toml_round_trip_sum(self):
        spec = {"type": "sum",
                "blocks": [{"type": "su", "n": 2}, {"type": "so", "p": 3, "q": 0}]}
        back = tomllib.loads(cfgmod.algebra_to_toml(spec))["algebra"]
        assert back == spec


class TestOverrides:
    def test_top_level(self):
        out = cfgmod.apply_overrides({"c0": 1.0, "m": 5}, {"c0": 0.25})
        assert out["c0"] == 0.25 and out["m"] == 5

    def test_dotted_list_path(self):
        data = {"d": [1.0, 2.0, 3.0]}
        out = cfgmod.apply_overrides(data, {"d.1": 9.0})
        assert out["d"] == [1.0, 9.0, 3.0]
        assert data["d"][1] == 2.0   # input untouched

    def test_nested_blocks(self):
        data = {"blocks": [{"c": 0.0}, {"c": 1.0}]}
        out = cfgmod.apply_overrides(data, {"blocks.1.c": 0.5})
        assert out["blocks"][1]["c"] == 0.5

    def test_missing_path(self):
        with pytest.raises(ConfigError):
            cfgmod.apply_overrides({"a": {}}, {"a.b.c": 1.0})


class TestSugraDicts:
    def test_eta_family_dict(self):
        cfg = cfgmod.sugra_config_from_dict({
            "kind": "eta_family", "m": 5, "c0": 0.0,
            "block1": {"family": "so", "p": 6, "q": 0}})
        assert isinstance(cfg, sg.SugraConfig)
        assert cfg.blocks[1].lam == -1.0

    def test_flux_key_validation(self):
        with pytest.raises(ConfigError):
            cfgmod.sugra_config_from_dict({
                "kind": "sugra",
                "blocks": [{"family": "so", "p": 4, "q": 2, "lambda": 1.0}],
                "flux": {"kind": "volume_products", "f": {"12": 1.0}}})

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            cfgmod.sugra_config_from_dict({"kind": "mystery"})

    def test_solve_variables_first_ansatz(self):
        names = cfgmod.solve_variables({"kind": "first_ansatz", "m_cp": 2})
        assert names == ["c0", "c1", "lambda1", "d0", "d1", "d2"]
