"""Plot the CSV datasets written by the `expwell` figure commands.

    expwell figure4 -o fig4.csv && python3 docs/plot.py figure4 fig4.csv fig4.png
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def figure3(df, ax):
    for g, grp in df[df.status == "ok"].groupby("g"):
        ax.plot(grp.k, grp.scaled, label=f"g={g:.3g}")
    ax.axhline(0, color="k", lw=0.5)
    ax.set(xlabel="k", ylabel="secular function · e^{πk}")
    ax.legend(fontsize="x-small", ncol=2)


def zeros(df, ax):
    for n, grp in df[df.status != "failed"].groupby("n"):
        ax.plot(grp.g, grp.k, marker=".", label=f"n={n}")
        flagged = grp[grp.precision_flag.astype(str) == "true"]
        ax.scatter(flagged.g, flagged.k, marker="x", color="r", zorder=3)
    ax.set(xlabel="g", ylabel="k_n(g)")
    ax.legend(fontsize="x-small", ncol=2)


def figure5(df, ax):
    ax.plot(df.r, df.psi_lower, label="k_n − dk")
    ax.plot(df.r, df.psi_upper, label="k_n + dk")
    ax.set(xlabel="r", ylabel="ψ(r)")
    ax.legend()


def wavefunction(df, ax):
    ax.plot(df.x, df.psi)
    ax.set(xlabel="x", ylabel="ψ(x)")


KINDS = {"figure3": figure3, "figure4": zeros, "figure6": zeros, "figure5": figure5, "wavefunction": wavefunction}


def main():
    if len(sys.argv) != 4 or sys.argv[1] not in KINDS:
        sys.exit(f"usage: plot.py {{{','.join(KINDS)}}} input.csv output.png")
    kind, src, dst = sys.argv[1:]
    df = pd.read_csv(src)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    KINDS[kind](df, ax)
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    main()
