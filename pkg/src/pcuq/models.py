"""Closed-form example models used for training data and end-to-end runs."""

import numpy as np


def shaft_margin(yield_strength, diameter, length, force, torque):
    """Yielding margin of a transmission shaft under combined bending/torsion.

    The margin is the yield strength minus the maximum equivalent stress

        margin = S - 1e-6 * (16 / (pi d^3)) * sqrt(4 F^2 L^2 + 3 T^2)

    with `yield_strength` in MPa, `diameter` and `length` in m, `force` in N
    and `torque` in N*m; the stress term is converted from Pa so the result is
    in MPa. Elementwise over array inputs.
    """
    bending = 4.0 * np.square(force * length)
    torsion = 3.0 * np.square(torque)
    stress = 1e-6 * (16.0 / (np.pi * np.asarray(diameter) ** 3)) * np.sqrt(
        bending + torsion
    )
    return np.asarray(yield_strength) - stress


class ShaftModel:
    """Batch-callable wrapper: rows are (yield MPa, d m, l m, F N, T N*m)."""

    n_inputs = 5

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return shaft_margin(
            points[:, 0], points[:, 1], points[:, 2], points[:, 3], points[:, 4]
        )


def plate_temperature_stand_in(conductivity, convection, emissivity,
                               ambient, height):
    """Synthetic smooth stand-in for a plate heat-transfer solver.

    Placeholder with plausible scales for configuration-level tests only; it
    does not model the physics and makes no claim of matching any solver.
    """
    return (
        320.0
        + 0.9 * (np.asarray(ambient) - 300.0)
        + 160.0 * np.asarray(emissivity)
        - 0.12 * (np.asarray(conductivity) - 400.0)
        + 55.0 * np.tanh(np.asarray(convection))
        + 12.0 * np.asarray(height)
        + 0.08 * np.asarray(emissivity) * (np.asarray(ambient) - 300.0)
    )


class PlateStandInModel:
    """Batch-callable wrapper: rows are (k, h, emissivity, T_ambient, H)."""

    n_inputs = 5

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return plate_temperature_stand_in(
            points[:, 0], points[:, 1], points[:, 2], points[:, 3], points[:, 4]
        )
