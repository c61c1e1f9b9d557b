"""Published benchmark instances and their reported solutions.

Four interpolation problems with 4, 6, 20 and 12 nodes, each with one or
more reported subarc matrices (12-decimal accuracy) and total lengths.
These serve as feasibility, refinement and audit fixtures throughout the
test suite.
"""

import math
from dataclasses import dataclass

import numpy as np

from mdinterp import OrientedPoint, ProblemSpec, Waypoint

PI = math.pi


def _spec(start, end, waypoints, a):
    return ProblemSpec(
        start=OrientedPoint(*start),
        end=OrientedPoint(*end),
        waypoints=tuple(Waypoint(*w) for w in waypoints),
        curvature_bound=a,
    )


@dataclass(frozen=True)
class Fixture:
    name: str
    spec: ProblemSpec
    word: str  # stage-separated subarc word
    t_f: float
    xi: np.ndarray  # (N, 5)


PROBLEM1 = _spec((0.0, 0.0, -PI / 3), (1.0, 1.0, -PI / 6), [(-0.1, 0.3), (0.2, 0.8)], 3.0)

PROBLEM2 = _spec(
    (0.0, 0.0, -PI / 3),
    (0.5, 0.0, -PI / 6),
    [(-0.1, 0.3), (0.2, 0.8), (1.0, 1.0), (0.5, 0.5)],
    3.0,
)

PROBLEM3 = _spec(
    (0.5, 1.2, 5 * PI / 6),
    (2.5, 0.6, 0.0),
    [
        (0.0, 0.8),
        (0.0, 0.4),
        (0.1, 0.0),
        (0.4, 0.2),
        (0.5, 0.5),
        (0.6, 1.0),
        (1.0, 0.8),
        (1.0, 0.0),
        (1.4, 0.2),
        (1.2, 1.0),
        (1.5, 1.2),
        (2.0, 1.5),
        (1.5, 0.8),
        (1.5, 0.0),
        (1.7, 0.6),
        (1.9, 1.0),
        (2.0, 0.5),
        (1.9, 0.0),
    ],
    5.0,
)

PROBLEM4 = _spec(
    (0.5, 1.2, 5 * PI / 6),
    (0.0, -0.5, 0.0),
    [
        (0.0, 0.5),
        (0.5, 0.5),
        (1.0, 0.5),
        (1.5, 0.5),
        (2.0, 0.5),
        (2.0, 0.0),
        (1.5, 0.0),
        (1.0, 0.0),
        (0.5, 0.0),
        (0.0, 0.0),
    ],
    3.0,
)

EXAMPLE1 = {
    "a": Fixture(
        "1a",
        PROBLEM1,
        "RSL|LSR|RSR",
        3.415578858075,
        np.array(
            [
                [0.0, 1.609029653347, 0.245373087450, 0.115596919495, 0.0],
                [0.115596919495, 0.0, 0.348770381640, 0.0, 0.122237275595],
                [0.0, 0.122237275595, 0.439185533812, 0.0, 0.297551811646],
            ]
        ),
    ),
    "b": Fixture(
        "1b",
        PROBLEM1,
        "RLR|RL|LSR",
        3.859270768865,
        np.array(
            [
                [0.0, 0.180338361465, 0.0, 1.671087869740, 0.449161039386],
                [0.0, 0.660606349458, 0.0, 0.040959265073, 0.0],
                [0.067722881739, 0.0, 0.474263660961, 0.0, 0.315131341041],
            ]
        ),
    ),
    "c": Fixture(
        "1c",
        PROBLEM1,
        "RLR|RL|LR",
        4.258605346880,
        np.array(
            [
                [0.0, 0.014658731348, 0.0, 1.660436142087, 0.198370374835],
                [0.0, 1.348732850403, 0.0, 0.144567480729, 0.0],
                [0.411565513223, 0.480274254254, 0.0, 0.0, 0.0],
            ]
        ),
    ),
    "d": Fixture(
        "1d",
        PROBLEM1,
        "LR|RSL|LSR",
        4.298084620005,
        np.array(
            [
                [1.672596123844, 0.171799627570, 0.0, 0.0, 0.0],
                [0.0, 1.364187065025, 0.033930811053, 0.191279146930, 0.0],
                [0.191279146930, 0.0, 0.328377898745, 0.0, 0.344634799909],
            ]
        ),
    ),
    "e": Fixture(
        "1e",
        PROBLEM1,
        "LSL|LR|RSR",
        4.678075540969,
        np.array(
            [
                [1.131511003931, 0.0, 0.645570959740, 1.376095696461, 0.0],
                [0.475478947958, 0.161367871190, 0.0, 0.0, 0.0],
                [0.0, 0.326240580072, 0.335261312120, 0.0, 0.226549169496],
            ]
        ),
    ),
    "f": Fixture(
        "1f",
        PROBLEM1,
        "LRL|LR|RSR",
        4.762973480924,
        np.array(
            [
                [1.387975996662, 0.040303570540, 0.0, 0.442471697617, 0.0],
                [1.532395666196, 0.398410096474, 0.0, 0.0, 0.0],
                [0.0, 0.530782705179, 0.306214787566, 0.0, 0.124418960689],
            ]
        ),
    ),
}

EXAMPLE2 = {
    "a": Fixture(
        "2a",
        PROBLEM2,
        "RSL|LSR|RSR|RSR|RLR",
        6.278034550309,
        np.array(
            [
                [0.0, 1.607146208885, 0.253152303916, 0.109461129478, 0.0],
                [0.109461129478, 0.0, 0.411866814272, 0.0, 0.063620967753],
                [0.0, 0.063620967753, 0.349008605883, 0.0, 0.551024831028],
                [0.0, 0.551024831028, 0.055775140041, 0.0, 0.362796821592],
                [0.0, 0.105078700947, 0.0, 1.425262495545, 0.259733602711],
            ]
        ),
    ),
    "b": Fixture(
        "2b",
        PROBLEM2,
        "RSL|LSR|RSR|RLR|LR",
        6.488873243877,
        np.array(
            [
                [0.0, 1.608655551819, 0.246889937788, 0.114406041268, 0.0],
                [0.114406041268, 0.0, 0.358542879421, 0.0, 0.113274189452],
                [0.0, 0.113274189452, 0.416609605051, 0.0, 0.341389286409],
                [0.0, 0.364397523143, 0.0, 0.045089419939, 0.908572347990],
                [1.499582819736, 0.243783411139, 0.0, 0.0, 0.0],
            ]
        ),
    ),
    "c": Fixture(
        "2c",
        PROBLEM2,
        "RLR|RL|LSR|RSR|RLR",
        6.729555454357,
        np.array(
            [
                [0.0, 0.185101731608, 0.0, 1.673440788217, 0.456049670642],
                [0.0, 0.622953488994, 0.0, 0.066834089291, 0.0],
                [0.121935127737, 0.0, 0.272852512220, 0.0, 0.565210311199],
                [0.0, 0.565210311199, 0.054452710847, 0.0, 0.357505055062],
                [0.0, 0.102754639709, 0.0, 1.426181573000, 0.259073444632],
            ]
        ),
    ),
    "d": Fixture(
        "2d",
        PROBLEM2,
        "RLR|RL|LSR|RSR|LR",
        6.933659387154,
        np.array(
            [
                [0.0, 0.180848776168, 0.0, 1.671336709782, 0.449898895805],
                [0.0, 0.655840953047, 0.0, 0.044391479634, 0.0],
                [0.074776055868, 0.0, 0.439394036526, 0.0, 0.354344875528],
                [0.0, 0.354344875528, 0.088624145788, 0.0, 0.876492352605],
                [1.499582819736, 0.243783411139, 0.0, 0.0, 0.0],
            ]
        ),
    ),
}

EXAMPLE3 = Fixture(
    "3",
    PROBLEM3,
    "LSL|LSR|RSL|LSL|LSL|LSR|RSR|RSL|LSL|LSR|RSL|LSR|RSL|LSL|LSL|LSR|RSR|RSL|LSR",
    11.916212654286,
    np.array(
        [
            [0.292683660485, 0.0, 0.354227249883, 0.066067208642, 0.0],
            [0.066067208642, 0.0, 0.314358037636, 0.0, 0.020629993182],
            [0.0, 0.020629993182, 0.158248660263, 0.281673366237, 0.0],
            [0.281673366237, 0.0, 0.105094394904, 0.017147975416, 0.0],
            [0.017147975416, 0.0, 0.262701065614, 0.036592830635, 0.0],
            [0.036592830635, 0.0, 0.278860332397, 0.0, 0.225886597060],
            [0.0, 0.225886597060, 0.151864534206, 0.0, 0.112422725874],
            [0.0, 0.112422725874, 0.488292307990, 0.245323671189, 0.0],
            [0.245323671189, 0.0, 0.131702140115, 0.125114048917, 0.0],
            [0.125114048917, 0.0, 0.565103190136, 0.0, 0.151217907866],
            [0.0, 0.151217907866, 0.164572410900, 0.054093591072, 0.0],
            [0.054093591072, 0.0, 0.281891534948, 0.0, 0.342811045871],
            [0.0, 0.342811045871, 0.568086259614, 0.061595474597, 0.0],
            [0.061595474597, 0.0, 0.510111126314, 0.348337479570, 0.0],
            [0.348337479569, 0.0, 0.386735718514, 0.003761723139, 0.0],
            [0.003761723139, 0.0, 0.178946350711, 0.0, 0.351310541702],
            [0.0, 0.351310541702, 0.216552941908, 0.0, 0.040835697925],
            [0.0, 0.040835697925, 0.212956892491, 0.349098604305, 0.0],
            [0.349098604305, 0.0, 0.378354575733, 0.0, 0.247028303126],
        ]
    ),
)

EXAMPLE4 = Fixture(
    "4",
    PROBLEM4,
    "LSL|LR|RSL|LSL|LSR|R|RSL|LSR|RSL|LSR|RLR",
    7.467562181965,
    np.array(
        [
            [0.517980939547, 0.0, 0.199236689725, 0.448783310430, 0.0],
            [0.444952611925, 0.098280826419, 0.0, 0.0, 0.0],
            [0.0, 0.102046764427, 0.396637972184, 0.002661244193, 0.0],
            [0.002661244193, 0.0, 0.426792526518, 0.071025820394, 0.0],
            [0.071025820394, 0.0, 0.085837912032, 0.0, 0.377944339773],
            [0.0, 0.565374719321, 0.0, 0.0, 0.0],
            [0.0, 0.377949440124, 0.085821641969, 0.071037130565, 0.0],
            [0.071037130565, 0.0, 0.426468907257, 0.0, 0.002973423917],
            [0.0, 0.002973423917, 0.467025768202, 0.030039625776, 0.0],
            [0.030039625776, 0.0, 0.237647474938, 0.0, 0.246307287638],
            [0.0, 0.052184608613, 0.0, 1.420667379008, 0.134146572224],
        ]
    ),
)

ALL_FIXTURES = (
    list(EXAMPLE1.values()) + list(EXAMPLE2.values()) + [EXAMPLE3, EXAMPLE4]
)

ALL_PROBLEMS = {
    "example1": PROBLEM1,
    "example2": PROBLEM2,
    "example3": PROBLEM3,
    "example4": PROBLEM4,
}
