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
# # Phase diagrams of the lossy models
#
# Region labels combine two ingredients at every parameter point:
#
# * which steady states are **dynamically stable** in the open system
#   (normal only / broken only / both), and
# * what the **loss-free limit** would say about the same point (normal
#   ground, normal unphysical, or normal merely excited).
#
# `I` normal-and-ground, `II` broken only, `III` costable,
# `IIp`/`IIIp` normal-only points whose loss-free limit is unphysical /
# excited -- the regions that exist *because* of the loss.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

from dpt.idtc import IdtcParams
from dpt.kpo import KpoParams
from dpt.phasediag import GridSpec, sweep, trace_boundary

FIG_DIR = Path(globals().get("__file__", "demos/demo.py")).resolve().parent / "figures"
FIG_DIR.mkdir(exist_ok=True)

ORDER = ["I", "II", "III", "IIp", "IIIp", "UNPHYS"]
COLORS = ["#4c72b0", "#dd8452", "#55a868", "#8172b3", "#c44e52", "#937860"]


def label_image(diagram):
    index = {name: i for i, name in enumerate(ORDER)}
    return np.array([[index[lab.value] for lab in row] for row in diagram.labels])


def draw(ax, diagram, x, y):
    image = label_image(diagram)
    cmap = ListedColormap(COLORS)
    ax.pcolormesh(x.values(), y.values(), image, cmap=cmap, vmin=-0.5, vmax=5.5)
    present = sorted({lab.value for lab in diagram.labels.ravel()}, key=ORDER.index)
    handles = [Patch(color=COLORS[ORDER.index(name)], label=name) for name in present]
    ax.legend(handles=handles, frameon=False, fontsize=8, loc="upper right")


# %% [markdown]
# ## KPO: detuning x pump at kappa/U = 0.4
#
# All five regions meet here.  The white dots trace the *first* boundary
# along each pump cut, and which boundary comes first depends on the
# detuning sign.  For `delta < 0` the pair is born only on the circle
# `|G|^2 = delta^2 + kappa^2` -- exactly where the normal state dies --
# so the pair-birth line `|G| = kappa` plays no role there, and the first
# change is the loss-free character flip at `|G| = |delta|` (region I
# turning IIp with no change in the attractors at all).  For
# `0 < delta < kappa` the same character flip comes first (IIIp turning
# IIp), while for `delta >= kappa` the pair birth at `|G| = kappa` wins
# (IIIp turning III).  The grey vertical lines mark the loss-free
# boundaries `delta = -+|G|` for the pump row `|G| = 0.5`.

# %%
base = KpoParams(delta=0.0, kerr=1.0, pump=0.0, kappa=0.4)
x = GridSpec("delta", -1.0, 1.0, 81)
y = GridSpec("pump", 0.0, 1.0, 81)
diagram = sweep("kpo", base, x, y)

traced = []
for d in np.linspace(-0.9, 0.9, 25):
    lo = KpoParams(d, 1.0, 1e-3, 0.4)
    hi = KpoParams(d, 1.0, 1.0, 0.4)
    point = trace_boundary("kpo", lo, hi, tol=1e-9)
    traced.append((d, abs(point.params.pump)))
traced = np.array(traced)

fig, ax = plt.subplots(figsize=(6.2, 4.6))
draw(ax, diagram, x, y)
ax.plot(traced[:, 0], traced[:, 1], "w.", ms=5, label="first traced boundary")
ax.axvline(-0.5, color="0.85", lw=0.8)
ax.axvline(0.5, color="0.85", lw=0.8)
ax.set_xlabel("delta")
ax.set_ylabel("|G|")
ax.set_title("KPO, open mode, kappa = 0.4")
fig.tight_layout()
fig.savefig(FIG_DIR / "05_kpo_diagram.png", dpi=150)
plt.close(fig)

values, counts = np.unique([lab.value for lab in diagram.labels.ravel()],
                           return_counts=True)
print("KPO label census:", dict(zip(values.tolist(), counts.tolist())))
# Cuts start at pump 1e-3, so a character line below that is already
# behind the low endpoint and the first visible change is the next one.
absd = np.abs(traced[:, 0])
expected = np.where(absd <= 1e-3, 0.4,
                    np.where(traced[:, 0] < 0, absd, np.minimum(absd, 0.4)))
print("traced first boundary vs |delta| (red) / min(delta, kappa) (blue):",
      "max deviation", np.max(np.abs(traced[:, 1] - expected)))

# %% [markdown]
# ## IDTC: the two broken lobes and the normal sliver
#
# In the `lambda_x x lambda_y` plane at `kappa = 0.1` the two ordered
# lobes (x-type and y-type) are separated by the normal-only wedge
# around the diagonal -- the dissipation-stabilized normal phase
# (`IIp`/`IIIp`) cutting between them.

# %%
base = IdtcParams(1.0, 1.0, 0.0, 0.0, 0.1)
x = GridSpec("lambda_x", 0.0, 1.0, 41)
y = GridSpec("lambda_y", 0.0, 1.0, 41)
diagram = sweep("idtc", base, x, y)

fig, ax = plt.subplots(figsize=(6.2, 4.6))
draw(ax, diagram, x, y)
lams = np.linspace(0.0, 1.0, 101)
kappa_ratio = 0.1
for slope in (np.sqrt(1.0 + kappa_ratio**2) - kappa_ratio,
              np.sqrt(1.0 + kappa_ratio**2) + kappa_ratio):
    ax.plot(lams, slope * lams, color="w", lw=0.8, ls=":")
ax.set_xlim(0.0, 1.0)
ax.set_ylim(0.0, 1.0)
ax.set_xlabel("lambda_x")
ax.set_ylabel("lambda_y")
ax.set_title("IDTC, open mode, kappa = 0.1 (dotted: wedge edges)")
fig.tight_layout()
fig.savefig(FIG_DIR / "05_idtc_diagram.png", dpi=150)
plt.close(fig)

values, counts = np.unique([lab.value for lab in diagram.labels.ravel()],
                           return_counts=True)
print("IDTC label census:", dict(zip(values.tolist(), counts.tolist())))
print("figures written to", FIG_DIR)
