import pytest
from hypothesis import given
from hypothesis import strategies as st

from wqed import ConfigError
from wqed.config import load_config, merge, parse_config


def test_parse_typed_values():
    values = parse_config(
        """
        # blockade point
        gamma = 1
        u = 10   # strong
        delta-a = 0.25
        absolute_units = yes
        seed = 7
        axis = gamma:0.1:20:200
        axis = u:1:10:3:log
        """
    )
    assert values == {
        "gamma": 1.0, "u": 10.0, "delta_a": 0.25, "absolute_units": True, "seed": 7,
        "axis": ["gamma:0.1:20:200", "u:1:10:3:log"],
    }


@pytest.mark.parametrize(
    "text", ["gamma 1", "volume = 3", "gamma = fast", "seed = 1.5", "joint = maybe", "u = 1\nu = 2", "u ="]
)
def test_malformed_config(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


@given(st.dictionaries(st.sampled_from(["a", "b", "c"]), st.integers() | st.none()))
def test_precedence(cli):
    defaults = {"a": 1, "b": 2, "c": 3}
    file_values = {"b": 20, "c": None}
    merged = merge(defaults, file_values, cli)
    for key in defaults:
        expected = cli.get(key)
        if expected is None:
            expected = file_values.get(key) if file_values.get(key) is not None else defaults[key]
        assert merged[key] == expected
