"""Why dual-certificate witnesses are theory-dependent.

Measure the four-outcome square measurement on the four states anti-aligned
with its effects.  The optimal witness is violated maximally (value 0 against
a classical bound of 2 - sqrt(2)), certifying nonclassicality -- but only if
the preparations really are those quantum states.  The very same statistics
admit a perfectly noncontextual four-ontic-state model, which the
noncontextual-model LP finds, so no theory-independent conclusion follows
from this data alone.
"""

from ncq import MultiSource, nc_model_lp, verify_ontological_model
from ncq.identities import measurement_identity_space, preparation_identity_space
from ncq.polytope import measurement_vertices, preparation_vertices
from ncq.reproduce import (
    SQUARE_WITNESS_BOUND,
    square_scaled_witness_value,
    square_scenario,
    square_scenario_model,
)

states, meas, beh = square_scenario()

value = square_scaled_witness_value(meas)
print(f"witness value on the noiseless measurement: {value:.3e}")
print(f"classical bound:                            {SQUARE_WITNESS_BOUND:.6f}  (= 2 - sqrt(2))")
print(f"violated: {value < SQUARE_WITNESS_BOUND}")

print()
print("statistics p(b|state):")
for x in range(4):
    row = ", ".join(f"{beh.table[0, b, x, 0]:.2f}" for b in range(4))
    print(f"  state {x}: [{row}]")

source = MultiSource.deterministic(states)
model = square_scenario_model()
report = verify_ontological_model(
    model, beh, preparation_identity_space(source), measurement_identity_space(meas)
)
print()
print("explicit noncontextual model residuals:", {k: f"{v:.1e}" for k, v in report.items() if k != "ok"})

lp = nc_model_lp(beh, preparation_vertices(source), measurement_vertices(meas))
print(f"noncontextual-model LP feasible: {lp.feasible}")
print()
print("So the witness violation coexists with a noncontextual model: the")
print("inequality certifies nonclassicality only modulo trust in the states.")
