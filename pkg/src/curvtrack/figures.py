"""Canonical run configurations for the figure reproductions.

``configs/*.cfg`` in the repository are copies of the ``fig3``/``fig4``/``fig5``
texts below (a test keeps them in sync).  The remaining entries are the extra
runs the acceptance suite needs.
"""

FIG3 = """\
# Dynamical Chern number of the torus vs delta2/delta1, MHz scale.
command = chern
manifold.kind = torus
manifold.delta1_over_2pi_mhz = 1.735
manifold.omega1_over_2pi_mhz = 1.735
protocol.tau_us = 1.0
protocol.start_state = bare
sweep.delta2_min = -4.27
sweep.delta2_max = 4.27
sweep.n = 101
output.path = fig3_chern_mhz.csv
"""

FIG3_KHZ = FIG3.replace("MHz scale", "17.35 kHz scale").replace("= 1.735", "= 0.01735").replace(
    "fig3_chern_mhz", "fig3_chern_khz"
)

FIG3_SPHERE = """\
# Dynamical Chern number of the sphere vs delta2/delta1, MHz scale.
command = chern
manifold.kind = sphere
manifold.delta1_over_2pi_mhz = 1.735
manifold.omega1_over_2pi_mhz = 1.735
protocol.tau_us = 1.0
protocol.start_state = bare
sweep.delta2_min = -4.27
sweep.delta2_max = 4.27
sweep.n = 101
output.path = fig3_chern_sphere.csv
"""

FIG4 = """\
# Dynamical Berry curvature map of the torus at 17.35 kHz.
command = map
manifold.kind = torus
manifold.delta1_over_2pi_mhz = 0.01735
manifold.omega1_over_2pi_mhz = 0.01735
protocol.tau_us = 1.0
protocol.start_state = bare
sweep.delta2_min = -2.0
sweep.delta2_max = 2.0
sweep.n = 101
numerics.n_theta = 201
map.quantity = curvature
output.path = fig4a_curvature.csv
"""

FIG4_OVERLAP = FIG4.replace("Dynamical Berry curvature map", "Ground-state overlap |<g|psi_g>|^2").replace(
    "map.quantity = curvature", "map.quantity = overlap_ground"
).replace("fig4a_curvature", "fig4b_overlap")

FIG4_SINGULARITIES = FIG4_OVERLAP.replace("command = map", "command = singularities").replace(
    "fig4b_overlap", "fig4_singularities"
)

FIG5 = """\
# Fidelity map of the torus at 1.735 MHz with T1 = 60 us, T2* = 40 us.
command = map
manifold.kind = torus
manifold.delta1_over_2pi_mhz = 1.735
manifold.omega1_over_2pi_mhz = 1.735
protocol.tau_us = 1.0
protocol.start_state = bare
noise.t1_us = 60.0
noise.t2_star_us = 40.0
sweep.delta2_min = -2.0
sweep.delta2_max = 2.0
sweep.n = 101
numerics.n_theta = 201
map.quantity = fidelity
output.path = fig5c_fidelity_noisy.csv
"""

FIG5_CLOSED = (
    FIG5.replace(" with T1 = 60 us, T2* = 40 us", ", closed system")
    .replace("noise.t1_us = 60.0\n", "")
    .replace("noise.t2_star_us = 40.0\n", "")
    .replace("fig5c_fidelity_noisy", "fig5b_fidelity_closed")
)

SHIPPED = {"fig3.cfg": FIG3, "fig4.cfg": FIG4, "fig5.cfg": FIG5}

ACCEPTANCE_RUNS = {
    "fig3_mhz": FIG3,
    "fig3_khz": FIG3_KHZ,
    "fig3_sphere": FIG3_SPHERE,
    "fig4a": FIG4,
    "fig4b": FIG4_OVERLAP,
    "fig4_singularities": FIG4_SINGULARITIES,
    "fig5b": FIG5_CLOSED,
    "fig5c": FIG5,
}
