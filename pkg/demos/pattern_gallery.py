"""Tour of the pattern combinatorics behind the bounds.

For a handful of small patterns, print the quantities every other module
consumes: automorphism count, density and strict balancedness, the rate
exponents, and the shared-edge statistics of each pair.
"""

from sbpoisson import parse_pattern_list, shared_edge_stats
from sbpoisson.patterns import automorphism_count, density_and_balance, gamma_eta

patterns = parse_pattern_list("edge,triangle,cycle_4,path_3,star_3,complete_4")
names = ["edge", "triangle", "cycle_4", "path_3", "star_3", "complete_4"]

print(f"{'pattern':<12}{'v':>3}{'e':>3}{'aut':>5}{'density':>9}{'balanced':>10}{'gamma':>8}{'eta':>7}")
for name, H in zip(names, patterns):
    dens, balanced, witness = density_and_balance(H)
    ge = gamma_eta(H, 1.0)
    print(
        f"{name:<12}{H.v:>3}{H.e:>3}{automorphism_count(H):>5}"
        f"{dens:>9.3f}{str(balanced):>10}{ge.gamma_subgraph:>8.3f}{ge.eta:>7.2f}"
    )
    if witness is not None and not balanced:
        print(f"    densest proper subgraph: {witness}")

print("\nShared-edge statistics (feasible overlap sizes and their vertex floors):")
for i in range(len(patterns)):
    for j in range(i + 1):
        stats = shared_edge_stats(patterns[i], patterns[j])
        if not stats.K:
            continue
        ell = {k: stats.ell[k] for k in sorted(stats.K)}
        print(f"  {names[i]:<12} x {names[j]:<12} M={stats.M}  ell={ell}")
