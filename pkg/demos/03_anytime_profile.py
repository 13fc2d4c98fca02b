"""The anytime contract: a usable answer after every validation step.

Runs the validation cycle on the reference network for a clean reading
and for a reading with a severe fault in g, printing the fault beliefs
and the quality score as they are refined. Interrupt anywhere: each step
record is self-contained.
"""

from pathlib import Path

import sensorval as sv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

net = sv.load_network((FIXTURES / "reference_net.json").read_text())
disc = sv.discretizer_from_json((FIXTURES / "reference_net.disc.json").read_text())
readings = sv.Dataset.from_csv((FIXTURES / "reference_readings.csv").read_text())
iso = sv.build_isolation_network(sv.emb_table(net))
criterion = sv.DetectionCriterion("sigma", 3.0)

for label, reading in [
    ("clean reading", readings.row(10)),
    ("severe fault injected in g",
     sv.inject_fault(readings.row(10), sv.FaultSpec("g", "severe"), disc)),
]:
    print(f"\n=== {label} ===")
    print("step  sensor  status   quality  beliefs")
    for rec in sv.run_anytime_validation(net, disc, iso, None, reading,
                                         criterion):
        beliefs = " ".join(f"{s}={rec.pf[s]:.2f}" for s in sorted(rec.pf))
        print(f"{rec.step:4}  {rec.sensor:6}  {rec.status:8} "
              f"{rec.quality:.3f}   {beliefs}")

print("\nstopping after the first step still yields an answer:")
gen = sv.run_anytime_validation(net, disc, iso, None, readings.row(3), criterion)
first = next(gen)
gen.close()
print(first.to_json())
