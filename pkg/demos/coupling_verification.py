"""Exhaustive verification of the size-biasing identity.

The coupled row for block i must satisfy P(Wtilde^i = k) = (k_i / lambda_i)
P(W^i = k) at every lattice point.  For small enough state spaces this can be
checked exactly, with no sampling error at all.  Three model families are
covered: dependent indicator blocks given by an explicit joint pmf, subgraph
counts in G(n, p) with the edge-addition coupling, and the urn with the
ball-replacement coupling.
"""

import numpy as np

from sbpoisson import independent_bernoulli_model, verify_size_biased_exact
from sbpoisson.ersim import exhaustive_h2_graph
from sbpoisson.hypergeom import UrnSpec, exhaustive_h2_urn
from sbpoisson.patterns import cycle_graph, single_edge
from sbpoisson.sizebias import model_from_weights

print("Indicator models")
model = independent_bernoulli_model([[0.3, 0.5, 0.2], [0.4, 0.6]])
print(f"  independent blocks:        {verify_size_biased_exact(model):.2e}")

rng = np.random.default_rng(7)
weights = {}
for c0 in [(0, 0), (0, 1), (1, 0), (1, 1)]:
    for c1 in [(0,), (1,)]:
        weights[(c0, c1)] = float(rng.random()) + 0.05
dependent = model_from_weights([2, 1], weights)
print(f"  dependent random weights:  {verify_size_biased_exact(dependent):.2e}")

print("Subgraph counts, all graphs on 4 vertices")
for p in (0.3, 0.7):
    v = exhaustive_h2_graph(4, (single_edge(),), 0, p)
    print(f"  edge pattern, p={p}:        {v:.2e}")
v = exhaustive_h2_graph(4, (cycle_graph(3),), 0, 0.4)
print(f"  triangle pattern, p=0.4:   {v:.2e}")

print("Urn, all samples and forced balls")
for colors, m in [((2, 2), 2), ((2, 3), 3), ((1, 2, 2), 2)]:
    urn = UrnSpec(sum(colors), colors, m)
    worst = max(exhaustive_h2_urn(urn, i) for i in range(urn.d))
    print(f"  colors {colors}, m={m}:      {worst:.2e}")
