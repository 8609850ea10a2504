#!/usr/bin/env python3
"""Smoke tests for the _morreylab extension module."""

import math
import sys

import _morreylab as ml

DISK = '{"kind":"disk","params":{"center":[0,0],"radius":1.0}}'
SQUARE = '{"kind":"polygon","params":{"vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]}}'


def approx(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    assert approx(ml.ball_lambda(2, 3.0, 1.0), math.pi / 2, 1e-12)
    assert approx(ml.ball_lambda(2, 4.0, 1.0), 16 * math.pi / 27, 1e-12)
    assert approx(ml.whole_space_constant(2, 4.0), 27 / (16 * math.pi**2), 1e-12)
    assert ml.holder_exponent(2, 3.0) == 0.5
    assert approx(ml.ball_extremal_value(2, 3.0, 1.0, 1.0, (0.25, 0.0), (0.0, 0.0)), 0.5, 1e-12)
    assert abs(ml.radial_support_ode_residual(3.0, 2, 0.5, 1.0)) < 1e-12

    assert ml.contains(DISK, 0.5, 0.0)
    assert not ml.contains(DISK, 1.5, 0.0)

    info = ml.mesh_info(DISK, 0.2, pole=(0.0, 0.0))
    assert info["interior"] >= 3
    assert approx(info["area"], math.pi, 0.02)

    sol = ml.solve_potential(DISK, 3.0, 0.1, (0.0, 0.0))
    assert approx(sol["lambda"], math.pi / 2, 0.10), sol["lambda"]
    assert sol["min"] >= -1e-10 and sol["max"] <= 1 + 1e-10
    assert approx(sol["green_diag"], sol["lambda"] ** -0.5, 1e-12)

    sq = ml.minkowski_combine_polygons([(0, 0), (1, 0), (1, 1), (0, 1)],
                                       [(0, 0), (1, 0), (1, 1), (0, 1)], 0.5)
    assert len(sq) == 4
    assert approx(ml.support_function_polygon(sq, (1.0, 1.0)), 2.0, 1e-12)

    checks = ml.run_battery(only=["radial-ode"])
    assert len(checks) == 1 and checks[0]["passed"], checks

    print("python smoke: all assertions passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
