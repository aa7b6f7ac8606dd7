"""Tests for YAML run configurations."""

import textwrap

import pytest


def _write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text).lstrip("\n"))
    return path


class TestDefaults:
    """Test configurations without a file."""

    def test_defaults(self):
        """Test the default sections."""
        from trilattice.config import parse_config

        config = parse_config()
        assert config.lattice.epsilon == pytest.approx(1.0 / 64.0)
        assert config.potentials.name == "quadratic"
        assert config.dislocations == []
        assert config.polygon().shape == (6, 2)
        assert config.source is None

    def test_overrides(self):
        """Test dotted overrides and that None leaves values alone."""
        from trilattice.config import parse_config

        config = parse_config(overrides={"lattice.epsilon": 0.125, "potentials.alpha1": None, "seed": 7})
        assert config.lattice.epsilon == 0.125
        assert config.potentials.alpha1 == 2.0
        assert config.seed == 7

    def test_tensor_from_potentials(self):
        """Test that the configured potentials determine the tensor."""
        from trilattice.config import parse_config

        config = parse_config(overrides={"potentials.alpha1": 4.0})
        assert config.tensor().mu == pytest.approx(3.0**0.5)


class TestFiles:
    """Test loading configuration files."""

    def test_full_file(self, tmp_path):
        """Test a file with dislocations, a far field and a relative domain path."""
        from trilattice.config import parse_config
        from trilattice.recovery.constructor import LinearFarField

        (tmp_path / "hex.txt").write_text("1 0\n0.5 0.8660254037844386\n-0.5 0.8660254037844386\n-1 0\n"
                                          "-0.5 -0.8660254037844386\n0.5 -0.8660254037844386\n")
        path = _write(tmp_path, """
            lattice:
              epsilon: 0.0625
              domain: hex.txt
            dislocations:
              - {x: 0.0, y: 0.0, b1: 1, b2: 0}
            far_field:
              matrix: [[0.01, 0.0], [0.0, 0.0]]
            """)
        config = parse_config(path)
        assert config.base_dir == tmp_path.resolve()
        assert config.polygon().shape == (6, 2)
        assert [d.burgers for d in config.layout()] == [(1, 0)]
        assert isinstance(config.far_field_model(), LinearFarField)
        assert config.output_path("x.csv") == tmp_path.resolve() / "x.csv"

    def test_empty_file(self, tmp_path):
        """Test that an empty file gives the defaults."""
        from trilattice.config import parse_config

        assert parse_config(_write(tmp_path, "")).lattice.gamma == 0.5


class TestErrors:
    """Test that every issue is reported with field and line."""

    def test_out_of_range_with_line(self, tmp_path):
        """Test a range error located at its line."""
        from trilattice.config import parse_config
        from trilattice.errors import ConfigError

        path = _write(tmp_path, """
            lattice:
              epsilon: 0.0625
              gamma: 1.5
            """)
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        (issue,) = info.value.issues
        assert issue.field == "lattice.gamma"
        assert issue.line == 3

    def test_all_issues_reported(self, tmp_path):
        """Test that unknown keys and unknown potentials are reported together."""
        from trilattice.config import parse_config
        from trilattice.errors import ConfigError

        path = _write(tmp_path, """
            lattice:
              spacing: 0.1
            potentials:
              name: lennard-jones
            """)
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        issues = {i.field: i for i in info.value.issues}
        assert issues["lattice.spacing"].kind == "extra_forbidden"
        assert issues["lattice.spacing"].line == 2
        assert "available" in issues["potentials.name"].message
        assert "2 configuration issue(s)" in str(info.value)

    def test_zero_burgers_vector(self, tmp_path):
        """Test that a zero Burgers vector is rejected."""
        from trilattice.config import parse_config
        from trilattice.errors import ConfigError

        path = _write(tmp_path, """
            dislocations:
              - {x: 0.0, y: 0.0, b1: 0, b2: 0}
            """)
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        assert info.value.issues[0].field == "dislocations[0]"
        assert info.value.issues[0].line == 2

    def test_syntax_error(self, tmp_path):
        """Test that malformed YAML is a configuration error."""
        from trilattice.config import parse_config
        from trilattice.errors import ConfigError

        path = _write(tmp_path, "lattice: [unclosed\n")
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        assert info.value.issues[0].kind == "SyntaxError"

    def test_bad_polygon_file(self, tmp_path):
        """Test that an unreadable domain is reported against lattice.domain."""
        from trilattice.config import parse_config
        from trilattice.errors import ConfigError

        (tmp_path / "bad.txt").write_text("0 0\nnot a vertex\n1 1\n")
        path = _write(tmp_path, """
            lattice:
              domain: bad.txt
            """)
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        assert info.value.issues[0].field == "lattice.domain"
        assert info.value.issues[0].kind == "InvalidPolygonError"


class TestSeparation:
    """Test layout checks against the separation conditions."""

    def test_close_pair(self, tmp_path):
        """Test that a close pair is reported at the second dislocation's line."""
        from trilattice.config import parse_config
        from trilattice.errors import ConfigError

        path = _write(tmp_path, """
            lattice:
              epsilon: 0.015625
            dislocations:
              - {x: 0.0, y: 0.0, b1: 1, b2: 0}
              - {x: 0.1, y: 0.0, b1: -1, b2: 0}
            """)
        with pytest.raises(ConfigError) as info:
            parse_config(path)
        (issue,) = info.value.issues
        assert issue.kind == "SeparationViolation"
        assert issue.field == "dislocations[1]"
        assert issue.line == 5

    def test_ladder_checked_only_on_request(self, tmp_path):
        """Test that a layout valid at ε can still fail on the scaling ladder."""
        from trilattice.config import parse_config
        from trilattice.errors import ConfigError

        path = _write(tmp_path, """
            lattice:
              epsilon: 0.001953125
            dislocations:
              - {x: 0.6, y: 0.0, b1: 1, b2: 0}
            """)
        parse_config(path)
        with pytest.raises(ConfigError) as info:
            parse_config(path, check_ladder=True)
        assert all(i.kind == "SeparationViolation" for i in info.value.issues)
        assert "epsilon=0.03125" in info.value.issues[0].message


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
