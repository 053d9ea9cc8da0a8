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
# # KPO response: squeezing, exceptional point, and weight inversion
#
# The fluctuations around the normal state of the lossy KPO carry three
# experimentally distinct signals:
#
# * a **squeezed** stationary quadrature (variance below the vacuum);
# * an **exceptional point** where the two relaxation rates collide
#   while every static observable stays smooth;
# * an **inverted spectral weight**: the retarded response at positive
#   frequencies turns negative on one side of the resonance condition,
#   although the state is dynamically stable.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dpt.kpo import (
    KpoParams,
    fluctuation_eigenvalues,
    keldysh_fluctuation_form,
    np_variance_closed_form,
    open_steady_states,
)
from dpt.response import build_spectra, keldysh_green

FIG_DIR = Path(globals().get("__file__", "demos/demo.py")).resolve().parent / "figures"
FIG_DIR.mkdir(exist_ok=True)


def np_greens(params, grid=None):
    form, losses = keldysh_fluctuation_form(params, open_steady_states(params)[0])
    return keldysh_green(form, losses, grid=grid)


# %% [markdown]
# ## Exceptional point on a detuning cut
#
# Along `delta in [-1, 1]` at `|G| = 0.3, kappa = 0.4` the two
# fluctuation eigenvalues share the real part `-kappa` outside
# `|delta| < |G|` and split inside.  The stationary variances cross the
# collision without a trace and dip below the vacuum (squeezing),
# reaching `11/14` at `delta = -0.7`.

# %%
deltas = np.linspace(-1.0, 1.0, 801)
rates = []
variances = []
for d in deltas:
    params = KpoParams(d, 1.0, 0.3, 0.4)
    state = open_steady_states(params)[0]
    rates.append(fluctuation_eigenvalues(params, state).real)
    variances.append(np_variance_closed_form(params))
rates = np.array(rates)
variances = np.array(variances)

fig, (ax_r, ax_v) = plt.subplots(1, 2, figsize=(9, 3.4))
ax_r.plot(deltas, rates[:, 0], label="Re eigenvalue 1")
ax_r.plot(deltas, rates[:, 1], label="Re eigenvalue 2")
ax_r.axvspan(-0.3, 0.3, color="tab:orange", alpha=0.15, label="split (overdamped)")
ax_r.set_xlabel("delta")
ax_r.set_ylabel("relaxation rates")
ax_r.legend(frameon=False, fontsize=8)
ax_v.plot(deltas, variances[:, 0], label="Var (real quadrature)")
ax_v.plot(deltas, variances[:, 1], label="Var (imaginary quadrature)")
ax_v.axhline(1.0, color="0.6", lw=0.8)
ax_v.axvspan(-0.3, 0.3, color="tab:orange", alpha=0.15)
ax_v.plot([-0.7], [11.0 / 14.0], "kv", ms=6, label="minimum 11/14")
ax_v.set_xlabel("delta")
ax_v.set_ylabel("stationary variance")
ax_v.legend(frameon=False, fontsize=8)
fig.tight_layout()
fig.savefig(FIG_DIR / "03_exceptional_point_cut.png", dpi=150)
plt.close(fig)
print("variance minimum:", variances[:, 0].min(), "at delta =",
      deltas[np.argmin(variances[:, 0])])

# %% [markdown]
# ## Spectral-weight inversion
#
# The spectral function `A(omega) = -2 Im G^R(omega)` of the normal
# state at `|G| = 0.5, kappa = 0.3`: for `delta = -1` both quasiparticle
# peaks carry positive weight, for `delta = +1` the positive-frequency
# peak flips sign -- the response at the soft side is *emissive* even
# though the state is stable.  The incoherent fluorescence `S(omega)`
# is identical for both signs of the detuning.

# %%
grid = np.linspace(-2.5, 2.5, 1601)
tables = {}
for delta in (-1.0, 1.0):
    tables[delta] = build_spectra(np_greens(KpoParams(delta, 1.0, 0.5, 0.3), grid=grid))

fig, (ax_a, ax_s) = plt.subplots(1, 2, figsize=(9, 3.4))
for delta, color in ((-1.0, "tab:blue"), (1.0, "tab:red")):
    ax_a.plot(grid, tables[delta].spectral, color=color, label=f"delta = {delta:+.0f}")
    ax_s.plot(grid, tables[delta].fluorescence, color=color,
              ls="-" if delta < 0 else "--", label=f"delta = {delta:+.0f}")
ax_a.axhline(0.0, color="0.6", lw=0.8)
ax_a.axvline(np.sqrt(3.0) / 2.0, color="0.6", lw=0.8)
ax_a.set_xlabel("omega")
ax_a.set_ylabel("A(omega)")
ax_a.set_title("weight inversion at the pole center (grey line)")
ax_a.legend(frameon=False)
ax_s.set_xlabel("omega")
ax_s.set_ylabel("S(omega)")
ax_s.set_title("fluorescence: identical for both detunings")
ax_s.legend(frameon=False)
fig.tight_layout()
fig.savefig(FIG_DIR / "03_weight_inversion.png", dpi=150)
plt.close(fig)

center = np.sqrt(3.0) / 2.0
for delta in (-1.0, 1.0):
    gset = np_greens(KpoParams(delta, 1.0, 0.5, 0.3))
    a_val = -2.0 * gset.evaluate(np.array([center]))[0][0][0, 0].imag
    print(f"A at the positive pole center, delta = {delta:+.0f}: {a_val:+.6f}")
print("figures written to", FIG_DIR)
