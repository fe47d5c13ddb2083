"""Hermiticity of the lattice monodromy ML g0 MR^-1, and what breaks it."""

from qcotangent.matword import HYPERBOLOID_IMAGES, evolve_check, wznw_periodicity_check

rep = wznw_periodicity_check()
res = rep.results[0]
print("obligation:", res.lhs, "=", res.rhs)
for s in res.trace.steps:
    print(f"  {s.before:22s} --[{s.rule} {s.direction}]--> {s.after}")

# ML^dag = ML instead of MR: the search gives up, which is expected
bad = dict(HYPERBOLOID_IMAGES, ML="ML", MR="MR")
print("\ncorrupted ML image proved:", wznw_periodicity_check(images=bad, max_states=4000).ok)

print("\ndiscrete evolution g(n) = Omega^n g:")
for r in evolve_check(3).results:
    print(f"  {r.rule:45s} {r.status} ({len(r.trace)} steps)")
