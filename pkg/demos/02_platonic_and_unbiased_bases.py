"""Noise robustness of platonic-solid measurements and mutually unbiased bases.

Platonic measurements point their effects at a solid's vertices.  The
tetrahedron is classical outright; the octahedron/cube pair and the
icosahedron/dodecahedron pair share values because the simulating parent
measurement of each solid is its polytope dual.

For full sets of mutually unbiased bases the assignment polytope degenerates
to a product of simplices, so classicality coincides with joint
measurability and the deterministic-vertex shortcut applies.
"""

from ncq import (
    make_mub_multimeasurement,
    make_platonic_measurement,
    measurement_identity_space,
    measurement_vertices,
    white_noise_robustness_measurement,
)

print("platonic solid   #effects  #vertices  eta")
for solid in ("tetrahedron", "octahedron", "cube", "icosahedron", "dodecahedron"):
    meas = make_platonic_measurement(solid)
    verts = measurement_vertices(meas)
    rep = white_noise_robustness_measurement(meas, verts)
    n = len(meas.effects_flat())
    print(f"{solid:15s}  {n:8d}  {verts.count:9d}  {rep.value:.8f}")

print()
print("mutually unbiased bases (d+1 bases per dimension):")
for d in (2, 3):
    meas = make_mub_multimeasurement(d)
    space = measurement_identity_space(meas)
    verts = measurement_vertices(meas)
    rep = white_noise_robustness_measurement(meas, verts)
    print(
        f"  d={d}: identity rank {space.rank} (normalization differences only), "
        f"{verts.count} deterministic vertices, eta = {rep.value:.8f}"
    )
print("  (d=4 runs too: 1024 vertices, a few minutes; see the slow test/CLI flag)")
