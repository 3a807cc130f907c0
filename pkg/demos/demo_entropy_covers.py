"""Volume entropy of graphs and voltage covers with their deck actions.

Run:  python3 demos/demo_entropy_covers.py
"""

import math

from barylab import graphs
from barylab.mmgraph import ball_measure, build_cover, volume_entropy

print("== ball growth on regular trees ==")
tree = graphs.regular_tree(3, 14)
for r in (1, 3, 5, 8):
    print(f"  |B(root, {r})| = {ball_measure(tree, 0, r):.0f}"
          f"  (closed form 3*2^{r} - 2 = {3 * 2**r - 2})")
est = volume_entropy(tree, 0, 4, 12)
print(f"3-regular tree: h = {est.h:.4f} vs log 2 = {math.log(2):.4f}, "
      f"regression residual {est.residual:.1e}")

est4 = volume_entropy(graphs.regular_tree(4, 10), 0, 3, 9)
print(f"4-regular tree: h = {est4.h:.4f} vs log 3 = {math.log(3):.4f}")

path = graphs.path_graph(200)
est_p = volume_entropy(path, 100, 10, 60)
print(f"path graph (linear growth): h = {est_p.h:.4f} (flat)")

print()
print("== voltage covers ==")
base = graphs.rose_graph(2)
print("base: a wedge of two loops (rank-2 rose)")
cover = build_cover(base, {0: (1, 2, 3, 0), 1: (0, 1, 2, 3)})
print(f"4-cyclic voltage on the first loop: cover has {cover.total.n} vertices, "
      f"{len(cover.deck)} deck transformations")
cover.validate()
print("covering property and deck/measure compatibility validated")

# covers are local isometries: ball masses below the girth scale agree
cage = graphs.tutte_coxeter_graph()
voltage = {e: ((1, 0) if e % 3 == 0 else (0, 1)) for e in range(len(cage.edges))}
double = build_cover(cage, voltage)
print(f"girth-8 cubic cage: double cover connected with {double.total.n} vertices")
for r in (1, 2, 3):
    print(f"  r = {r}: base ball {ball_measure(cage, 0, r):.0f}, "
          f"cover ball {ball_measure(double.total, (0, 0), r):.0f} (equal below girth)")
hb = volume_entropy(cage, 0, 1, 3)
ht = volume_entropy(double.total, (0, 0), 1, 3)
print(f"window entropies: base {hb.h:.4f}, cover {ht.h:.4f} "
      f"(cover growth is never below the quotient)")
