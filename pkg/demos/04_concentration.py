# %% [markdown]
# # Fluctuations around the kinetic limit
#
# The distance between the particle system and the kinetic solution is random.
# Across independent replicas its typical size should fall like $n^{-1/2}$, and
# the fraction of replicas beyond a fixed threshold should shrink with $n$.
#
# Replicas get independent seeds derived from one master seed, so the whole
# sweep is reproducible and does not depend on how many worker processes run it.
# This demo keeps the sweep small; the acceptance test uses $R = 50$ and $n$ up to $10^5$.

# %%
from twospecies.harness import aggregate_pdmp, config_from_dict, loglog_slope, run_pdmp_sweep

cfg = config_from_dict(dict(
    ic_name="tent", grid_step=1.25e-4, t_end=0.4,
    n_list=[300, 3000, 30_000], replicas=12, master_seed=2024,
))
records = run_pdmp_sweep(cfg, workers=1)
base = aggregate_pdmp(records, [])
eps = base[0]["median"]
for row in aggregate_pdmp(records, [eps]):
    print(f"n={row['n']:>6}  median={row['median']:.3e}  P(sup d >= {eps:.3f}) ~ {row[f'tail_{eps!r}']:.2f}")
print("log-log slope of the median:", round(loglog_slope([r["n"] for r in base], [r["median"] for r in base]), 3))

# %% [markdown]
# Each record keeps the whole distance trace, so the time of the worst
# deviation can be read off too.

# %%
worst = max(records, key=lambda r: r.sup_distance)
i = max(range(len(worst.times)), key=lambda k: worst.distances[k])
print(f"largest deviation {worst.sup_distance:.3e} at t={worst.times[i]:.3f} (n={int(worst.param_value)}, replica {worst.replica})")
