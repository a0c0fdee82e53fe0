"""Build the hardness instances and confirm their optima with the exact solvers.

``python3 demos/reductions_tour.py``
"""

from secluded import exact_secluded_path, exact_secluded_steiner
from secluded.generators import (
    five_set_rbsc,
    reduce_rbsc_to_directed_pp,
    reduce_rbsc_to_pp,
    reduce_vc_to_directed_pp,
    reduce_vc_to_ps_bounded_degree,
    reduce_vc_to_weighted_pp,
)
from secluded.graph import complete_graph, path_graph

bases = {"edge": path_graph(2), "P3": path_graph(3), "K3": complete_graph(3)}

print("vertex cover gadgets (path problems)")
for name, base in bases.items():
    for make in (reduce_vc_to_weighted_pp, reduce_vc_to_directed_pp):
        gi = make(base)
        got = exact_secluded_path(gi.graph, gi.source, gi.target).exposure
        print(f"  {name:<5} {gi.params['family']:<12} n={gi.graph.n:<3} expected={gi.expected_optimum} oracle={got}")

print("vertex cover gadgets (Steiner, bounded degree)")
for name, base in bases.items():
    gi = reduce_vc_to_ps_bounded_degree(base)
    got = exact_secluded_steiner(gi.graph, gi.terminals).exposure
    print(f"  {name:<5} maxdeg={gi.graph.max_degree()} expected={gi.expected_optimum} oracle={got}")

print("red-blue set cover, five-set example with M=125")
for make in (reduce_rbsc_to_pp, reduce_rbsc_to_directed_pp):
    gi = make(five_set_rbsc(), 125)
    got = exact_secluded_path(gi.graph, gi.source, gi.target).exposure
    print(f"  {gi.params['family']:<9} n={gi.graph.n} expected={gi.expected_optimum} oracle={got}")
