"""Regenerates the JSON fixtures in this directory.

Run from the repository root: python3 fixtures/generate.py
"""

import json
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent


def cplx(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def write(name, obj):
    (HERE / name).write_text(json.dumps(obj, indent=1) + "\n")


def model(shifts, kraus):
    return {"lattice_dim": len(shifts[0]), "shifts": shifts, "kraus": [cplx(k) for k in kraus]}


def diag_state(h, diag, site=(0,)):
    m = [[complex(diag[i]) if i == j else 0j for j in range(h)] for i in range(h)]
    return {"entries": [{"site": list(site), "matrix": cplx(m)}]}


def two_level():
    s = math.sqrt
    left = [[s(1 / 2), 0], [-s(2) / 3, s(1 / 3)]]
    right = [[s(1 / 6), 0], [1 / 3, s(2 / 3)]]
    return model([[-1], [1]], [[[complex(x) for x in r] for r in left], [[complex(x) for x in r] for r in right]])


def four_level(p1, p2, p3):
    s = math.sqrt
    left = [
        [1 / (2 * s(2)), 0, 0, 0],
        [s(p1 / 2), 1 / s(2), 0, 0],
        [s(p2 / 2), 0, 1 / s(2), 0],
        [-s(p3 / 3), 0, 0, s(2 / 3)],
    ]
    right = [
        [s(3 / 8), 0, 0, 0],
        [-s(p1 / 2), 1 / s(2), 0, 0],
        [-s(p2 / 2), 0, 1 / s(2), 0],
        [s(2 * p3 / 3), 0, 0, s(1 / 3)],
    ]
    return model([[-1], [1]], [[[complex(x) for x in r] for r in left], [[complex(x) for x in r] for r in right]])


def commuting(shifts, zeta):
    """zeta[i][j]: eigenvalue of Kraus operator j on basis vector i."""
    h = len(zeta)
    kraus = []
    for j in range(len(shifts)):
        kraus.append([[zeta[i][j] if i == k else 0j for k in range(h)] for i in range(h)])
    return model(shifts, kraus)


def main():
    s = math.sqrt
    write("two_level.json", two_level())
    write("four_level_p6.json", four_level(1 / 6, 1 / 6, 1 / 6))
    write("four_level_p3_half.json", four_level(0.0, 0.0, 0.5))
    # Basis vectors 0 and 1 share their eigenvalue rows and form one block.
    write(
        "commuting_d1.json",
        commuting([[1], [-1]], [[s(0.7), s(0.3)], [s(0.7), s(0.3)], [0.5j, s(0.75)]]),
    )
    write(
        "commuting_d2.json",
        commuting(
            [[1, 0], [-1, 0], [0, 1], [0, -1]],
            [[s(0.4), s(0.1), s(0.3), s(0.2)], [s(0.1), s(0.2) * 1j, s(0.25), s(0.45)]],
        ),
    )
    write("state_h2_e0.json", diag_state(2, [1, 0]))
    write("state_h2_e1.json", diag_state(2, [0, 1]))
    write("state_h4_e0.json", diag_state(4, [1, 0, 0, 0]))
    write("state_h4_recurrent_mix.json", diag_state(4, [0, 1 / 3, 1 / 3, 1 / 3]))
    write("state_h3_uniform.json", diag_state(3, [1 / 3, 1 / 3, 1 / 3]))
    write("state_h2_uniform_2d.json", diag_state(2, [0.5, 0.5], site=(0, 0)))


if __name__ == "__main__":
    main()
