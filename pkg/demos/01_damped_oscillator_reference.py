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
# # The damped oscillator: eigenvalue collision vs. smooth covariance
#
# The noisy oscillator `x'' = -omega0^2 x - kappa x' + xi(t)` is the
# smallest system with the two phenomena the larger models in this
# package combine:
#
# * its drift eigenvalues **collide** at `kappa = 2 omega0` and split
#   along the real axis (the overdamped transition -- an
#   exceptional-point analogue);
# * its stationary **covariance is perfectly smooth** across that
#   collision: nothing thermodynamic happens there.
#
# Everything below is closed-form; the Lyapunov solves are cross-checks.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dpt.numerics import solve_lyapunov
from dpt.oscillator import (
    OscParams,
    companion_matrix,
    overdamped_eigenvalues,
    overdamped_variance,
    rotating_spectral_function,
)

FIG_DIR = Path(globals().get("__file__", "demos/demo.py")).resolve().parent / "figures"
FIG_DIR.mkdir(exist_ok=True)

# %% [markdown]
# ## Eigenvalue collision
#
# Below `kappa = 2 omega0` the two drift eigenvalues form a damped
# conjugate pair `-kappa/2 +- i sqrt(omega0^2 - kappa^2/4)`; above it
# they are real and distinct.  At the collision both equal `-kappa/2`
# exactly.

# %%
omega0 = 1.0
kappas = np.linspace(0.0, 4.0, 801)
eigs = np.array([overdamped_eigenvalues(OscParams(omega0, k))[0] for k in kappas])

fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(9, 3.2), sharex=True)
for i, style in enumerate(("-", "--")):
    ax_re.plot(kappas, eigs[:, i].real, style, color="tab:blue")
    ax_im.plot(kappas, eigs[:, i].imag, style, color="tab:orange")
for ax, label in ((ax_re, "Re eigenvalue"), (ax_im, "Im eigenvalue")):
    ax.axvline(2.0 * omega0, color="0.6", lw=0.8)
    ax.set_xlabel("kappa")
    ax.set_ylabel(label)
ax_re.set_title("real parts split beyond kappa = 2 omega0")
ax_im.set_title("imaginary parts vanish there")
fig.tight_layout()
fig.savefig(FIG_DIR / "01_eigenvalue_collision.png", dpi=150)
plt.close(fig)

pair_at = overdamped_eigenvalues(OscParams(omega0, 2.0 * omega0))[0]
print("eigenvalues at the collision:", pair_at)

# %% [markdown]
# ## The covariance does not feel the collision
#
# `Var x = sigma^2 / (2 kappa omega0^2)` and `Var p = sigma^2 / (2 kappa)`
# are monotone in `kappa` straight through the overdamped transition.
# The dots are independent Lyapunov solves of `M K + K M^T + D = 0`.

# %%
sigma = 1.3
dense = np.linspace(0.2, 4.0, 400)
var_x = np.array([overdamped_variance(OscParams(omega0, k, sigma))[0] for k in dense])
var_p = np.array([overdamped_variance(OscParams(omega0, k, sigma))[1] for k in dense])

check_at = np.linspace(0.4, 3.8, 12)
lyap = []
for k in check_at:
    params = OscParams(omega0, k, sigma)
    cov = solve_lyapunov(companion_matrix(params), np.diag([0.0, sigma**2]))
    lyap.append((cov[0, 0], cov[1, 1]))
lyap = np.array(lyap)

fig, ax = plt.subplots(figsize=(5.4, 3.4))
ax.plot(dense, var_x, label="Var x (closed form)")
ax.plot(dense, var_p, label="Var p (closed form)")
ax.plot(check_at, lyap[:, 0], "o", ms=4, color="k", label="Lyapunov solve")
ax.plot(check_at, lyap[:, 1], "o", ms=4, color="k")
ax.axvline(2.0 * omega0, color="0.6", lw=0.8)
ax.set_xlabel("kappa")
ax.set_ylabel("stationary variance")
ax.legend(frameon=False)
ax.set_title("smooth across the eigenvalue collision (grey line)")
fig.tight_layout()
fig.savefig(FIG_DIR / "01_variance_smooth.png", dpi=150)
plt.close(fig)

worst = np.max(np.abs(lyap - np.column_stack([
    [overdamped_variance(OscParams(omega0, k, sigma))[0] for k in check_at],
    [overdamped_variance(OscParams(omega0, k, sigma))[1] for k in check_at],
])))
print("max |closed form - Lyapunov| =", worst)

# %% [markdown]
# ## Unit spectral weight
#
# In a rotating frame the empty damped mode has the Lorentzian spectral
# function `A(omega) = 2 kappa / ((omega + detuning)^2 + kappa^2)`, whose
# integral `int A domega / (2 pi) = 1` -- the sum rule the interacting
# models must also obey.

# %%
omega = np.linspace(-8.0, 8.0, 4001)
fig, ax = plt.subplots(figsize=(5.4, 3.4))
for kappa in (0.1, 0.3, 1.0):
    a = rotating_spectral_function(-1.0, kappa, omega)
    weight = np.trapezoid(a, omega) / (2.0 * np.pi)
    ax.plot(omega, a, label=f"kappa = {kappa}: weight {weight:.4f}")
ax.set_xlabel("omega")
ax.set_ylabel("A(omega)")
ax.legend(frameon=False)
ax.set_title("unit-weight Lorentzians at the detuned resonance")
fig.tight_layout()
fig.savefig(FIG_DIR / "01_lorentzian_weight.png", dpi=150)
plt.close(fig)
print("figures written to", FIG_DIR)
