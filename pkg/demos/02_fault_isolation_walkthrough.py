"""Step-by-step fault isolation with the two-layer noisy-OR network.

Replays the classic scenario on the reference network: a real fault in g
makes t and g apparently faulty, and the fault-probability vector pins the
real culprit as findings accumulate. Link strength 0.99, priors 0.5.
"""

import sensorval as sv

emb = sv.EmbTable({
    "m": {"m", "t", "p"},
    "t": {"t", "m", "g", "a"},
    "p": {"p", "m"},
    "g": {"g", "t"},
    "a": {"a", "t"},
})
iso = sv.build_isolation_network(emb)   # c = 0.99, prior = 0.5

print("apparent-fault parents (who can explain whom):")
for s in iso.sensors:
    print(f"  A_{s} <- {sorted(iso.parents_of[s])}")

sequence = [("t", "faulty"), ("m", "correct"), ("g", "faulty"),
            ("a", "correct"), ("p", "correct")]
order = ["m", "t", "p", "g", "a"]

print("\nfinding       " + "  ".join(f"P({s})" for s in order) + "   quality")
findings = {}
pf = sv.fault_belief(iso, findings)
print(f"{'(initial)':12}" + "  ".join(f"{pf[s]:5.3f}" for s in order)
      + f"   {sv.quality(pf):.3f}")
for sensor, status in sequence:
    findings[sensor] = status
    pf = sv.fault_belief(iso, findings)
    print(f"{f'{sensor} = {status}':12}"
          + "  ".join(f"{pf[s]:5.3f}" for s in order)
          + f"   {sv.quality(pf):.3f}")

declared = sv.declare_faults(pf, 0.9)
print(f"\ndeclared at threshold 0.9: {sorted(declared)}")
