"""Reference values for the C++ tests, computed with scipy/statsmodels.

Run once before the build; the output header is committed:
    python3 tests/oracles/make_oracles.py > tests/oracle_values.hpp
"""
import math

import numpy as np
import pandas as pd
from scipy import optimize, signal, stats
from statsmodels.stats.anova import AnovaRM

out = []


def emit(name, value):
    out.append(f"inline constexpr double {name} = {float(value)!r};")


def emit_array(name, values):
    vals = ", ".join(repr(float(v)) for v in values)
    out.append(f"inline constexpr double {name}[] = {{{vals}}};")


# --- repeated-measures ANOVA, 6 subjects x 3 conditions -----------------------
anova = np.array([
    [4.1, 5.3, 9.0],
    [3.2, 4.0, 5.1],
    [5.5, 5.9, 11.2],
    [2.8, 4.4, 4.0],
    [4.9, 5.0, 8.3],
    [3.6, 5.7, 6.9],
])
n, k = anova.shape
long = pd.DataFrame(
    [(s, c, anova[s, c]) for s in range(n) for c in range(k)], columns=["subject", "cond", "y"]
)
table = AnovaRM(long, "y", "subject", within=["cond"]).fit().anova_table
f_value = table["F Value"].iloc[0]
df1 = table["Num DF"].iloc[0]
df2 = table["Den DF"].iloc[0]
p_unc = table["Pr > F"].iloc[0]

# Greenhouse-Geisser epsilon via orthonormal contrasts (Box 1954 form)
contrasts = np.linalg.qr(np.column_stack([np.ones(k), np.eye(k)[:, : k - 1]]))[0][:, 1:]
s = np.cov(anova, rowvar=False, ddof=1)
m = contrasts.T @ s @ contrasts
eps = np.trace(m) ** 2 / ((k - 1) * np.trace(m @ m))
p_gg = stats.f.sf(f_value, df1 * eps, df2 * eps)

emit_array("kAnovaFixture", anova.ravel())
emit("kAnovaF", f_value)
emit("kAnovaDf1", df1)
emit("kAnovaDf2", df2)
emit("kAnovaPUncorrected", p_unc)
emit("kAnovaEpsilon", eps)
emit("kAnovaPCorrected", p_gg)

pair_t, pair_p = [], []
for a, b in [(0, 1), (0, 2), (1, 2)]:
    r = stats.ttest_rel(anova[:, a], anova[:, b])
    pair_t.append(r.statistic)
    pair_p.append(r.pvalue)
emit_array("kPairedT", pair_t)
emit_array("kPairedP", pair_p)

# --- F distribution upper tail ------------------------------------------------
f_points = [(0.5, 2, 40), (3.23, 2, 40), (12.57, 2, 40), (1.7, 1.38, 6.9), (4.0, 3.5, 17.25)]
emit_array("kFTailArgs", [v for triple in f_points for v in triple])
emit_array("kFTail", [stats.f.sf(*t) for t in f_points])

# --- L2 logistic regression ---------------------------------------------------
rng = np.random.default_rng(20240517)
x = rng.normal(size=(40, 3))
true_w = np.array([1.5, -2.0, 0.5])
logits = x @ true_w + 0.3
y = (rng.uniform(size=40) < 1.0 / (1.0 + np.exp(-logits))).astype(float)
l2 = 1e-2


def objective(theta):
    w, b = theta[:3], theta[3]
    z = x @ w + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * w @ w
    p = 1.0 / (1.0 + np.exp(-z))
    g = np.concatenate([x.T @ (p - y) / len(y) + l2 * w, [np.mean(p - y)]])
    return loss, g


res = optimize.minimize(objective, np.zeros(4), jac=True, method="L-BFGS-B",
                        options={"gtol": 1e-13, "ftol": 1e-16, "maxiter": 10000})
emit_array("kLogisticX", x.ravel())
emit_array("kLogisticY", y)
emit("kLogisticL2", l2)
emit_array("kLogisticWeights", res.x[:3])
emit("kLogisticBias", res.x[3])

# --- zero-phase Butterworth band-pass -------------------------------------------
rate, lo, hi = 500.0, 0.5, 30.0
sos = signal.butter(4, [lo, hi], btype="bandpass", fs=rate, output="sos")
i = np.arange(1000)
sig = np.sin(0.05 * i) + 0.5 * np.sin(1.3 * i) + 0.3 * np.cos(0.002 * i * i) + 2.0
pad = min(math.ceil(rate / lo), len(sig) - 1)
filtered = signal.sosfiltfilt(sos, sig, padtype="odd", padlen=pad)
probe = [0, 1, 17, 250, 499, 500, 731, 998, 999]
emit_array("kFiltfiltProbeIndex", probe)
emit_array("kFiltfiltProbe", filtered[probe])
freqs = [0.25, 1.0, 10.0, 30.0, 50.0, 100.0]
_, h = signal.sosfreqz(sos, worN=freqs, fs=rate)
emit_array("kButterFreqs", freqs)
emit_array("kButterGain", np.abs(h))

print("#pragma once")
print()
print("// Generated by tests/oracles/make_oracles.py (scipy, statsmodels). Do not edit.")
print()
print("namespace eegrc::oracle {")
print()
print("\n".join(out))
print()
print("}  // namespace eegrc::oracle")
