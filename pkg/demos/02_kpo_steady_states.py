# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Kerr parametric oscillator: mean-field landscape and steady states
#
# A single Kerr mode (detuning `delta`, Kerr constant `U`) driven by a
# two-photon pump `G` and damped at rate `kappa`.  The Z2 symmetry
# `alpha -> -alpha` breaks into a pair of phase-locked states once the
# pump wins; the interplay of which states **exist** and which are
# **dynamically stable** is the whole phase-diagram story.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dpt.kpo import (
    KpoParams,
    closed_ground_state,
    mf_energy,
    open_steady_states,
    stability_report,
)

FIG_DIR = Path(globals().get("__file__", "demos/demo.py")).resolve().parent / "figures"
FIG_DIR.mkdir(exist_ok=True)

# %% [markdown]
# ## Loss-free ground state: a kink at delta = -|G|
#
# Without loss the broken pair exists for `delta > -|G|` and is then
# always the ground state; its photon number grows linearly.  Between
# `-|G| < delta < |G|` the normal state's excitations are imaginary
# (the normal state is not even a physical saddle), beyond `|G|` it is
# physical but excited.

# %%
pump = 0.5
deltas = np.linspace(-1.0, 1.0, 401)
ground_n = []
ground_e = []
for d in deltas:
    ground = closed_ground_state(KpoParams(d, 1.0, pump, 0.0))[0]
    ground_n.append(abs(ground.alpha) ** 2)
    ground_e.append(ground.energy)

fig, (ax_n, ax_e) = plt.subplots(1, 2, figsize=(9, 3.2))
ax_n.plot(deltas, ground_n)
ax_n.set_ylabel("ground-state photon number")
ax_e.plot(deltas, ground_e)
ax_e.set_ylabel("ground-state energy")
for ax in (ax_n, ax_e):
    ax.axvspan(-pump, pump, color="tab:red", alpha=0.12,
               label="normal state unphysical")
    ax.axvline(-pump, color="0.6", lw=0.8)
    ax.set_xlabel("delta")
    ax.legend(frameon=False, loc="upper left")
fig.tight_layout()
fig.savefig(FIG_DIR / "02_closed_ground_state.png", dpi=150)
plt.close(fig)

# %% [markdown]
# ## Open system: census along the pump axis
#
# With loss the pair condenses only above `|G| = kappa`, and a *second*
# (small-amplitude, always unstable) pair exists while the normal state
# is still stable -- the bistable window.  Solid: stable; dashed:
# unstable.

# %%
delta, kappa = 1.0, 0.3
pumps = np.linspace(0.0, 1.3, 261)
branch_n = {b: np.full(pumps.size, np.nan) for b in range(5)}
branch_stable = {b: np.zeros(pumps.size, dtype=bool) for b in range(5)}
for i, g in enumerate(pumps):
    params = KpoParams(delta, 1.0, g, kappa)
    for state in open_steady_states(params):
        branch_n[state.branch][i] = abs(state.alpha) ** 2
        report = stability_report(params, state, want_covariance=False)
        branch_stable[state.branch][i] = report.stable or report.boundary

fig, ax = plt.subplots(figsize=(5.8, 3.6))
colors = {0: "tab:blue", 1: "tab:red", 2: "tab:red", 3: "tab:green", 4: "tab:green"}
for b in range(5):
    n = branch_n[b]
    stable = branch_stable[b]
    ax.plot(pumps, np.where(stable, n, np.nan), "-", color=colors[b], lw=1.6)
    ax.plot(pumps, np.where(stable, np.nan, n), "--", color=colors[b], lw=1.2)
ax.axvline(kappa, color="0.6", lw=0.8)
ax.axvline(np.hypot(delta, kappa), color="0.6", lw=0.8)
ax.set_xlabel("|G|")
ax.set_ylabel("photon number")
ax.set_title("pair condenses at |G| = kappa; normal state dies at\n"
             "|G| = sqrt(delta^2 + kappa^2) (grey lines)")
fig.tight_layout()
fig.savefig(FIG_DIR / "02_open_census.png", dpi=150)
plt.close(fig)

counts = {}
for g in (0.1, 0.5, 1.2):
    counts[g] = len(open_steady_states(KpoParams(delta, 1.0, g, kappa)))
print("steady-state counts along the pump axis:", counts)

# %% [markdown]
# ## Energy landscape with all five states
#
# In the bistable window the mean-field energy shows the normal state at
# the origin, the two deep phase-locked wells, and the two saddle points
# of the unstable pair between them.

# %%
params = KpoParams(1.0, 1.0, 0.5, 0.3)
x = np.linspace(-1.8, 1.8, 301)
grid_x, grid_y = np.meshgrid(x, x)
energy = np.array([
    [mf_energy(params, complex(gx, gy)) for gx in x] for gy in x
])

fig, ax = plt.subplots(figsize=(5.2, 4.4))
contour = ax.contourf(grid_x, grid_y, energy, levels=41, cmap="viridis")
fig.colorbar(contour, ax=ax, label="mean-field energy")
for state in open_steady_states(params):
    report = stability_report(params, state, want_covariance=False)
    marker = "o" if report.stable else "x"
    ax.plot(state.alpha.real, state.alpha.imag, marker, color="w", ms=8, mew=2)
ax.set_xlabel("Re alpha")
ax.set_ylabel("Im alpha")
ax.set_title("o stable, x unstable")
fig.tight_layout()
fig.savefig(FIG_DIR / "02_energy_landscape.png", dpi=150)
plt.close(fig)
print("figures written to", FIG_DIR)
