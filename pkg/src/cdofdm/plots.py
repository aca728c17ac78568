"""Optional matplotlib rendering of sweep results (Agg backend, PNG files)."""

import numpy as np


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _by_scheme(rows):
    out = {}
    for r in rows:
        out.setdefault(r["scheme"], []).append(r)
    return out


def plot_ber(rows, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for scheme, rs in _by_scheme(rows).items():
        s = [r["sinr_db"] for r in rs]
        b = [r["value"] for r in rs]
        ax.semilogy(s, b, "o-", label=scheme)
    ax.set_xlabel("SINR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_rmse(rows_range, rows_velocity, path) -> None:
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, rows, label in ((axes[0], rows_range, "range RMSE (m)"),
                            (axes[1], rows_velocity, "velocity RMSE (m/s)")):
        for scheme, rs in _by_scheme(rows).items():
            s = [r["sinr_db"] for r in rs]
            v = [r["value"] for r in rs]
            ax.plot(s, v, "o-", label=scheme)
        ax.set_xlabel("SINR (dB)")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_aepp(rows, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    keys = sorted({(r["scheme"], r["M"], r["NC"]) for r in rows})
    for scheme, m, n_ch in keys:
        rs = [r for r in rows if (r["scheme"], r["M"], r["NC"]) == (scheme, m, n_ch)]
        s = [r["sinr_db"] for r in rs]
        ax.semilogy(s, [r["aepp_formula"] for r in rs], "-",
                    label=f"{scheme} M={m} NC={n_ch} formula")
        mc = np.array([r["aepp_montecarlo"] for r in rs], dtype=float)
        if np.isfinite(mc).any():
            ax.semilogy(s, np.where(mc > 0, mc, np.nan), "x",
                        label=f"{scheme} M={m} NC={n_ch} measured")
    ax.set_xlabel("SINR (dB)")
    ax.set_ylabel("error-propagation power")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_radar_image(image_magnitude: np.ndarray, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    db = 20.0 * np.log10(np.maximum(image_magnitude, 1e-300))
    im = ax.imshow(db.T, origin="lower", aspect="auto", cmap="viridis",
                   vmin=db.max() - 60.0)
    ax.set_xlabel("delay bin")
    ax.set_ylabel("Doppler bin")
    fig.colorbar(im, ax=ax, label="magnitude (dB)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
