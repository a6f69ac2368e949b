#!/usr/bin/env python3
"""Generate data/default_humanoid.model: a 24-joint SMPL-topology humanoid.

Segment masses are anthropometric fractions scaled to 70 kg total; inertia
tensors are solid-ellipsoid approximations from segment dimensions.
Axes: x forward, y left, z up.
"""
import sys

# name, parent, offset (m), mass (kg), com (m), ellipsoid semi-axes (m)
JOINTS = [
    ("pelvis",      -1, (0.00,  0.00,  0.00), 10.3, (0.00,  0.00,  0.03), (0.12, 0.14, 0.09)),
    ("l_hip",        0, (0.00,  0.09, -0.05),  7.0, (0.00,  0.00, -0.20), (0.07, 0.07, 0.21)),
    ("r_hip",        0, (0.00, -0.09, -0.05),  7.0, (0.00,  0.00, -0.20), (0.07, 0.07, 0.21)),
    ("spine1",       0, (0.00,  0.00,  0.11),  7.0, (0.00,  0.00,  0.06), (0.10, 0.12, 0.07)),
    ("l_knee",       1, (0.00,  0.00, -0.40),  3.0, (0.00,  0.00, -0.21), (0.05, 0.05, 0.21)),
    ("r_knee",       2, (0.00,  0.00, -0.40),  3.0, (0.00,  0.00, -0.21), (0.05, 0.05, 0.21)),
    ("spine2",       3, (0.00,  0.00,  0.13),  7.0, (0.00,  0.00,  0.06), (0.10, 0.12, 0.07)),
    ("l_ankle",      4, (0.00,  0.00, -0.42),  0.9, (0.06,  0.00, -0.03), (0.09, 0.04, 0.03)),
    ("r_ankle",      5, (0.00,  0.00, -0.42),  0.9, (0.06,  0.00, -0.03), (0.09, 0.04, 0.03)),
    ("spine3",       6, (0.00,  0.00,  0.05),  9.0, (0.00,  0.00,  0.10), (0.11, 0.13, 0.10)),
    ("l_foot",       7, (0.13,  0.00, -0.07),  0.2, (0.04,  0.00,  0.00), (0.04, 0.03, 0.01)),
    ("r_foot",       8, (0.13,  0.00, -0.07),  0.2, (0.04,  0.00,  0.00), (0.04, 0.03, 0.01)),
    ("neck",         9, (0.00,  0.00,  0.21),  0.8, (0.00,  0.00,  0.03), (0.04, 0.04, 0.05)),
    ("l_collar",     9, (0.00,  0.07,  0.12),  0.9, (0.00,  0.05,  0.00), (0.04, 0.07, 0.03)),
    ("r_collar",     9, (0.00, -0.07,  0.12),  0.9, (0.00, -0.05,  0.00), (0.04, 0.07, 0.03)),
    ("head",        12, (0.00,  0.00,  0.07),  4.9, (0.00,  0.00,  0.08), (0.08, 0.07, 0.10)),
    ("l_shoulder",  13, (0.00,  0.10,  0.02),  1.9, (0.00,  0.13,  0.00), (0.04, 0.14, 0.04)),
    ("r_shoulder",  14, (0.00, -0.10,  0.02),  1.9, (0.00, -0.13,  0.00), (0.04, 0.14, 0.04)),
    ("l_elbow",     16, (0.00,  0.26,  0.00),  1.1, (0.00,  0.12,  0.00), (0.03, 0.13, 0.03)),
    ("r_elbow",     17, (0.00, -0.26,  0.00),  1.1, (0.00, -0.12,  0.00), (0.03, 0.13, 0.03)),
    ("l_wrist",     18, (0.00,  0.25,  0.00),  0.4, (0.00,  0.04,  0.00), (0.02, 0.05, 0.04)),
    ("r_wrist",     19, (0.00, -0.25,  0.00),  0.4, (0.00, -0.04,  0.00), (0.02, 0.05, 0.04)),
    ("l_hand",      20, (0.00,  0.08,  0.00),  0.1, (0.00,  0.03,  0.00), (0.015, 0.04, 0.03)),
    ("r_hand",      21, (0.00, -0.08,  0.00),  0.1, (0.00, -0.03,  0.00), (0.015, 0.04, 0.03)),
]


def ellipsoid_inertia(m, semi):
    a, b, c = semi
    return (m / 5.0 * (b * b + c * c),
            m / 5.0 * (a * a + c * c),
            m / 5.0 * (a * a + b * b))


def main(out):
    total = sum(j[3] for j in JOINTS)
    assert abs(total - 70.0) < 1e-9, total
    with open(out, "w") as f:
        f.write("torquescore-model v1\n")
        f.write("# 24-joint SMPL-topology humanoid, 70 kg, solid-ellipsoid inertias\n")
        f.write("# name parent off_x off_y off_z mass com_x com_y com_z Ixx Iyy Izz Ixy Ixz Iyz\n")
        for name, parent, off, mass, com, semi in JOINTS:
            ixx, iyy, izz = ellipsoid_inertia(mass, semi)
            f.write(f"{name} {parent} {off[0]:g} {off[1]:g} {off[2]:g} {mass:g} "
                    f"{com[0]:g} {com[1]:g} {com[2]:g} "
                    f"{ixx:.8g} {iyy:.8g} {izz:.8g} 0 0 0\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/default_humanoid.model")
