# %% [markdown]
# # The particle system
#
# With $n$ particles, each of mass $1/n$, the process is piecewise
# deterministic: species-1 particles drift left at unit speed until one hits
# the origin. It is removed, and a uniformly chosen species-2 particle becomes
# species 1 where it stands. When a removal finds no species-2 particle left,
# the run stops in a cemetery state.
#
# Positions are never updated during drift. A species-1 particle is stored
# under the key ``position + insertion time``, so a single heap gives the next
# removal time directly.
#
# Start with the smallest case: one particle of each species.

# %%
import math

import numpy as np

from twospecies import initial, kinetic, pdmp
from twospecies.measures import pair_distance

f1, f2 = initial.two_particle()
s = pdmp.pdmp_init(f1, f2, 2, seed=7)
print("species 1 at", s.s1_positions(), " species 2 at", s.s2_positions())
s.advance_to(math.inf)
print(s.event_log_csv())
print("cemetery:", s.cemetery, " loss at t=0.9:", s.loss_count(0.9))

# %% [markdown]
# With many particles the empirical measures track the kinetic solution.
# Initial positions are quantiles of the initial densities, so at $t = 0$ the
# pair distance is at most $2/n$.

# %%
g1, g2 = initial.tent(1.25e-4)
sol = kinetic.solve(g1, g2)
times = np.linspace(0, 0.4, 9)
for n in (100, 10_000, 1_000_000):
    s = pdmp.pdmp_init(g1, g2, n, seed=pdmp.replica_seed(2024, 0))
    snaps = pdmp.pdmp_run(s, 0.4, times)
    d = [pair_distance(sn.pair(), sol.pair_at(sn.t)) for sn in snaps]
    print(f"n={n:>9,}  removals={s.removals:>7,}  d(0)={d[0]:.2e}  sup d={max(d):.2e}")
