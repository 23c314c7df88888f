"""Figure rendering for the CLI report paths.

Each helper writes a single PNG next to the machine-readable output.  All
plotting is optional: importing this module pulls in matplotlib, so the CLI
only does it when a figure was actually requested.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_polygon_figure(polygon, outfile: str) -> None:
    """Closed polygon drawn from the cumulative edge sums."""
    verts = np.vstack([np.zeros((1, 2)), np.cumsum(polygon.edges, axis=0)])
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(verts[:, 0], verts[:, 1], "o-", lw=1.5, ms=4)
    ax.set_aspect("equal")
    ax.set_title(f"{polygon.n}-gon, closure {polygon.closure_residual():.2e}")
    ax.grid(True, alpha=0.3)
    fig.savefig(outfile, dpi=120, bbox_inches="tight")
    plt.close(fig)


def save_path_figure(path, d, outfile: str, samples: int = 512) -> None:
    """Frame and norm residuals along a certificate path's grid."""
    grid = path.grid
    k = grid[0].shape[0]
    frame_res, norm_res = [], []
    for g in grid:
        frame_res.append(np.linalg.norm(g @ g.T - np.eye(k)))
        norm_res.append(np.max(np.abs((g ** 2).sum(axis=0) - d.values)))
    steps = [np.linalg.norm(b - a) for a, b in zip(grid, grid[1:])]
    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    axes[0].semilogy(np.maximum(frame_res, 1e-18), label="frame residual")
    axes[0].semilogy(np.maximum(norm_res, 1e-18), label="norm residual")
    axes[0].legend()
    axes[0].grid(True, alpha=0.3)
    axes[1].plot(steps)
    axes[1].set_ylabel("step size")
    axes[1].set_xlabel("grid index")
    axes[1].grid(True, alpha=0.3)
    fig.savefig(outfile, dpi=120, bbox_inches="tight")
    plt.close(fig)


def save_fiber_figure(reps, d, outfile: str) -> None:
    """Pairwise chordal distances between fiber component representatives."""
    m = len(reps)
    dist = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            dist[i, j] = np.linalg.norm(reps[i].entries - reps[j].entries)
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(dist, cmap="viridis")
    fig.colorbar(im, ax=ax, label="chordal distance")
    ax.set_title(f"{m} component representative(s)")
    fig.savefig(outfile, dpi=120, bbox_inches="tight")
    plt.close(fig)
