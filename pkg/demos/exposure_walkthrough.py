"""Short tour: why the shortest or cheapest-by-degree route is not the least exposed one.

Run with ``python3 demos/exposure_walkthrough.py``.
"""

from secluded import (
    approx_secluded_path,
    exact_secluded_path,
    exact_secluded_steiner,
    secluded_path_bounded_degree,
    solve_treewidth_secluded_steiner,
)
from secluded.approx import approx_secluded_steiner_all
from secluded.generators import gen_degcost_gap_instance
from secluded.graph import Graph, cost


def show(title, g, nodes):
    rep = cost(g, nodes)
    print(f"  {title:<28} nodes={list(nodes)} exposure={rep.exposure} degsum={rep.deg_cost}")


# 0 and 1 can meet through a busy hub (2) or walk around it
g = Graph(7, [(0, 2), (2, 1), (2, 3), (2, 4), (0, 5), (5, 6), (6, 1)])
print("hub graph, route 0 -> 1")
show("through the hub", g, [0, 2, 1])
show("oracle", g, exact_secluded_path(g, 0, 1).solution.nodes)
show("min degree-sum heuristic", g, approx_secluded_path(g, 0, 1).solution.nodes)
show("suffix DP", g, secluded_path_bounded_degree(g, 0, 1).solution.nodes)

# the gap family: every tree exposes everything, degree sums disagree
gi = gen_degcost_gap_instance(4, 6)
print(f"\ngap family, delta=4 k=6: {gi.graph.n} nodes, terminals {list(gi.terminals)}")
opt = exact_secluded_steiner(gi.graph, gi.terminals)
print("  oracle exposure", opt.exposure, "| treewidth DP",
      solve_treewidth_secluded_steiner(gi.graph, gi.terminals).exposure)
for tag, out in approx_secluded_steiner_all(gi.graph, gi.terminals).items():
    print(f"  {tag.value:<16} exposure={out.exposure} claimed={out.claimed_ratio}")
