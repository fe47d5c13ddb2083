"""Assemble T*G_q for SL(2), look at its rewrite rules and a few normal forms."""

from qcotangent.cli import EvalContext, eval_expr, parse_expr, relation_lines
from qcotangent.heisenberg import assemble_system, check_jimbo_drinfeld, det_coefficient

system = assemble_system(2)
print(f"{len(system)} rewrite rules (g letters ordered a < b < c < d):")
for line in relation_lines(system):
    print("  ", line)

# which multiple of bc makes ad - c*bc central?
print("\ncentral determinant: ad - c bc with c =", det_coefficient(assemble_system(2, with_det=False)))

ctx = EvalContext()
for text in ("g[1,1]*g[2,2] - q^-1*g[1,2]*g[2,1]", "Xp*Xm - Xm*Xp", "K*Xp*Kinv", "dag(g[1,2]*g[2,2])"):
    print(f"nf({text}) = {eval_expr(parse_expr(text), ctx).render()}")

rep = check_jimbo_drinfeld(system)
print("\nJimbo-Drinfeld relations hold:", rep.ok)
