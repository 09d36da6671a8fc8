"""Towers: truncations of unbounded index sets and their decompositions.

A generator produces one presentation per level over a shared base;
decomposing with one shared splitting cache makes every level restrict
to the one below, so the tower has a single well-defined decomposition.
"""

from mvb.atlas import validate
from mvb.cubecat import full_set, nonempty_subsets
from mvb.rand import twisted_instance
from mvb.split import is_decomposition
from mvb.tower import (
    InfinityPresentation,
    RuleGenerator,
    StabilizingGenerator,
    decompose_infinity,
)

stabilizing = InfinityPresentation(
    StabilizingGenerator(twisted_instance(999, n=2, n_points=2, n_charts=2)))
t4 = stabilizing.truncate(4)
print("stabilizing generator truncated at level 4: n =", t4.n,
      " valid:", validate(t4).valid,
      " padded slot dims beyond level 2 are zero:",
      all(t4.dims.dim(s) == 0
          for s in nonempty_subsets(full_set(4))
          if not s.issubset(full_set(2))))

rule = InfinityPresentation(RuleGenerator(
    ["p", "q"],
    [("0", ("p", "q")), ("1", ("p",))],
    {"kind": "threshold", "dim": 1, "max_card": 2},
    {"kind": "conjugate", "seed": 5},
))
print("rule generator level 3 valid:", validate(rule.truncate(3)).valid)

tower = decompose_infinity(stabilizing)
print("level 3 decomposition verifies:", is_decomposition(tower.level(3)))
print("level 4 restricts to level 3 on every node up to 3:",
      all(tower.node_map_agrees(node, 3, 4)
          for node in nonempty_subsets(full_set(3))))
