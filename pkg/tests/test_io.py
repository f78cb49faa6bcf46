import json

import numpy as np
import pytest

from dispersia.density import ChargeDensity, Configuration
from dispersia.energy import drude_oscillator
from dispersia.io import (
    ParseError,
    density_from_dict,
    parse_configuration,
    read_density,
    read_path,
    read_surface,
    read_toy,
    surface_from_dict,
    surface_to_dict,
    toy_from_dict,
    write_density,
)
from dispersia.pathopt import PathOnConfigSpace
from dispersia.rotations import rotation_about


def test_density_round_trip(tmp_path):
    rho = ChargeDensity([[0.1, 0.2, 0.3], [-0.4, 0.5, -0.6]], [1.5, -1.5], "pair")
    for name in ("rho.json", "rho.csv"):
        write_density(rho, tmp_path / name)
        back = read_density(tmp_path / name)
        np.testing.assert_array_equal(back.points, rho.points)
        np.testing.assert_array_equal(back.weights, rho.weights)


def test_csv_error_reports_line_and_field(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y,z,w\n0,0,0,1\n0,zero,0,-1\n")
    with pytest.raises(ParseError) as exc:
        read_density(path)
    assert exc.value.line == 3 and exc.value.field == "y"
    assert "line 3" in str(exc.value)


def test_csv_header_required(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c,d\n0,0,0,1\n")
    with pytest.raises(ParseError, match="line 1"):
        read_density(path)


def test_json_syntax_error_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "points": [[0, 0, 0]],\n  "weights": [1,]\n}\n')
    with pytest.raises(ParseError) as exc:
        read_density(path)
    assert exc.value.line == 3


def test_json_content_errors_name_the_field():
    with pytest.raises(ParseError) as exc:
        density_from_dict({"points": [[0, 0, 0], [1, 0, 0]], "weights": [1.0]})
    assert exc.value.field == "weights" and "length mismatch" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        density_from_dict({"points": [[0, 0, "a"]], "weights": [1.0]})
    assert exc.value.field == "points[0][2]"
    with pytest.raises(ParseError) as exc:
        density_from_dict({"points": [[0, 0, 0]], "weights": [1.0], "colour": "red"})
    assert exc.value.field == "colour"


def test_missing_file_names_path(tmp_path):
    with pytest.raises(FileNotFoundError, match="nowhere.json"):
        read_density(tmp_path / "nowhere.json")


def test_toy_round_trip(tmp_path):
    mol = drude_oscillator()
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(mol.to_json()))
    back = read_toy(path)
    np.testing.assert_allclose(back.hamiltonian, mol.hamiltonian)
    np.testing.assert_allclose(back.dipole_ops, mol.dipole_ops)
    with pytest.raises(ParseError, match="Dz"):
        toy_from_dict({"H": [[1]], "Dx": [[0]], "Dy": [[0]]})


def test_configuration_parsing(tmp_path):
    tau = parse_configuration('{"L": 3}')
    assert tau.L == 3.0 and np.array_equal(tau.U, np.eye(3))
    with pytest.raises(ParseError, match="configuration.U"):
        parse_configuration('{"L": 3, "U": [[2, 0, 0], [0, 1, 0], [0, 0, 1]]}')
    with pytest.raises(ParseError, match="configuration.L"):
        parse_configuration('{"U": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}')


def test_path_round_trip(tmp_path):
    path = PathOnConfigSpace([Configuration(2.0), Configuration(3.0, rotation_about([0, 1, 0], 1.0))])
    (tmp_path / "path.json").write_text(json.dumps(path.to_json()))
    back = read_path(tmp_path / "path.json")
    np.testing.assert_allclose(back.nodes[1].U, path.nodes[1].U)


def test_surface_file(data_dir):
    surf = read_surface(data_dir / "dipole_surface.json")
    assert surf.orders == ((1, 1), (1, 2), (2, 1), (2, 2))
    again = surface_from_dict(surface_to_dict(surf))
    tau = Configuration(5.0, rotation_about([1, 2, 3], 0.4))
    assert again(tau) == surf(tau)
    with pytest.raises(ParseError, match="orders"):
        surface_from_dict({"rho1": surface_to_dict(surf)["rho1"], "rho2": surface_to_dict(surf)["rho2"],
                           "orders": [[1, "a"]]})
