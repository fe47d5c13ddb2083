"""The three worked hyperboloid computations as replayable matrix-word proofs."""

from qcotangent.matword import (
    dagger_equation, default_rulebase, sample_computations, verify_involution_consistency,
)

base = default_rulebase()
for tag in ("Rgg+", "RLL++/R+", "RLg+"):
    eq = base.by_tag(tag)
    img = dagger_equation(eq, "hyperboloid")
    print(f"{tag}:   {eq.render()}")
    print(f"  image: {img.render()}")

print()
for res in sample_computations(base=base).results:
    print(f"{res.rule}: {res.status} in {len(res.trace)} step(s), replays: {res.trace.verify()}")
    for s in res.trace.steps:
        print(f"    {s.before:32s} --[{s.rule} {s.direction}]--> {s.after}")

for form in ("compact", "hyperboloid"):
    rep = verify_involution_consistency(form, 12, base)
    d = rep.to_dict()
    longest = max(len(r.trace) for r in rep.results)
    print(f"\n{form}: {d['proved']}/{d['total']} dagger images proved, longest proof {longest} steps")
