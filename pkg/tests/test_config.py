import math

import pytest

from kregbattery.config import load_config, parse_config, parse_value
from kregbattery.errors import ValidationError


def test_values():
    assert parse_value("4..12") == list(range(4, 13))
    assert parse_value("2..10:2") == [2, 4, 6, 8, 10]
    assert parse_value("X, Y,Z") == ["X", "Y", "Z"]
    assert parse_value("pi/2") == pytest.approx(math.pi / 2)
    assert parse_value("2*pi") == pytest.approx(2 * math.pi)
    assert parse_value("true") is True
    assert parse_value("1e-3") == 1e-3


def test_parse_config_with_comments():
    cfg = parse_config("# sweep\nn_sites = 4..6  # sizes\ncharger_k = 2\n", source="a.cfg")
    assert cfg["n_sites"] == [4, 5, 6] and cfg["charger_k"] == 2
    assert cfg.where("charger_k") == "a.cfg:3: key 'charger_k'"


@pytest.mark.parametrize("text,fragment", [
    ("n_sites 4", ":1: expected"),
    ("n_sites = 4\nn_sites = 5", "repeated"),
    ("n sites = 4", "bad key"),
    ("n_sites =", "no value"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ValidationError, match=fragment):
        parse_config(text)


def test_load_config_missing(tmp_path):
    with pytest.raises(ValidationError):
        load_config(tmp_path / "nope.cfg")
