"""Radial grids on [0, R] and the cumulative quadrature used throughout.

A grid is split into segments at the jump points of the weight.  Sampled
integrands are stored per segment ("extended" samples), so a node sitting
on a jump carries a left and a right value.  Within a segment, the
integral over each cell is that of the cubic through four neighbouring
samples, which makes cumulative integrals fourth order for piecewise
smooth data on any node distribution.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy import sparse


class Grid:
    def __init__(self, nodes, breakpoints=()):
        r = np.asarray(nodes, dtype=float)
        if r.ndim != 1 or r.size < 2:
            raise ValueError("grid needs at least two nodes")
        if r[0] != 0.0:
            raise ValueError("grid must start at r = 0")
        if np.any(np.diff(r) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        self.r = r
        self.r.flags.writeable = False
        brk = [0]
        for b in breakpoints:
            hit = np.flatnonzero(np.isclose(r, b, rtol=0, atol=1e-13 * max(1.0, r[-1])))
            if hit.size == 0:
                raise ValueError(f"breakpoint {b} is not a grid node")
            if 0 < hit[0] < r.size - 1:
                brk.append(int(hit[0]))
        brk.append(r.size - 1)
        self.breaks = np.array(sorted(set(brk)))

    @property
    def R(self) -> float:
        return float(self.r[-1])

    @property
    def M(self) -> int:
        return self.r.size - 1

    @property
    def h(self):
        return np.diff(self.r)

    def __len__(self):
        return self.r.size

    def __repr__(self):
        return f"Grid(M={self.M}, R={self.R}, segments={len(self.breaks) - 1})"

    # ------------------------------------------------------------------
    @cached_property
    def ext_node(self) -> np.ndarray:
        """Node index of each extended sample."""
        return np.concatenate([np.arange(a, b + 1) for a, b in zip(self.breaks[:-1], self.breaks[1:])])

    @cached_property
    def ext_side(self) -> np.ndarray:
        """+1 (right limit) or -1 (left limit) for each extended sample."""
        sides = []
        for a, b in zip(self.breaks[:-1], self.breaks[1:]):
            s = np.ones(b - a + 1)
            s[-1] = -1.0
            sides.append(s)
        out = np.concatenate(sides)
        out[-1] = -1.0
        return out

    @cached_property
    def ext_r(self) -> np.ndarray:
        return self.r[self.ext_node]

    def expand(self, values) -> np.ndarray:
        """Nodal values -> extended samples (continuous data)."""
        return np.asarray(values)[..., self.ext_node]

    @cached_property
    def cell_weights(self) -> sparse.csr_matrix:
        """Sparse (M, n_ext) matrix mapping extended samples to cell integrals."""
        rows, cols, vals = [], [], []
        offset = 0
        for a, b in zip(self.breaks[:-1], self.breaks[1:]):
            x = self.r[a:b + 1]
            n = b - a
            w, start = _cell_stencil_weights(x)
            k = np.arange(n)
            npts = w.shape[1]
            rows.append(np.repeat(a + k, npts))
            cols.append((offset + start[:, None] + np.arange(npts)[None, :]).ravel())
            vals.append(w.ravel())
            offset += n + 1
        return sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.M, offset),
        )

    def cumulative(self, ext_samples) -> np.ndarray:
        """Cumulative integral from 0 to each node, from extended samples."""
        cells = self.cell_weights @ np.asarray(ext_samples, dtype=float)
        out = np.empty(self.M + 1)
        out[0] = 0.0
        np.cumsum(cells, out=out[1:])
        return out

    def cumulative_nodal(self, values) -> np.ndarray:
        """Cumulative integral of continuous nodal data."""
        return self.cumulative(self.expand(values))

    def integrate(self, ext_samples) -> float:
        return float(np.sum(self.cell_weights @ np.asarray(ext_samples, dtype=float)))

    def refined(self) -> "Grid":
        """Grid with every cell halved."""
        mid = 0.5 * (self.r[1:] + self.r[:-1])
        nodes = np.empty(2 * self.M + 1)
        nodes[0::2] = self.r
        nodes[1::2] = mid
        return Grid(nodes, self.r[self.breaks[1:-1]])

    @property
    def breakpoints(self):
        return self.r[self.breaks[1:-1]]


def _cell_stencil_weights(x):
    """Weights integrating the local interpolating cubic over each cell.

    Returns (weights[n_cells, npts], stencil_start[n_cells]).
    """
    n = x.size - 1
    npts = min(4, n + 1)
    k = np.arange(n)
    start = np.clip(k - 1, 0, n + 1 - npts)
    idx = start[:, None] + np.arange(npts)[None, :]
    hk = (x[1:] - x[:-1])
    t = (x[idx] - x[k][:, None]) / hk[:, None]
    powers = np.arange(npts)
    V = t[:, None, :] ** powers[None, :, None]  # V[c, i, j] = t_j^i
    rhs = np.broadcast_to(1.0 / (powers + 1.0), (n, npts))
    w = np.linalg.solve(V, rhs[..., None])[..., 0]
    return w * hk[:, None], start


def uniform_grid(R: float, M: int, breakpoints=()) -> Grid:
    """About M cells, uniform on each segment between breakpoints."""
    bps = [float(b) for b in breakpoints if 0.0 < b < R]
    edges = np.array([0.0, *bps, float(R)])
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(3, int(round(M * (hi - lo) / R)))
        pieces.append(np.linspace(lo, hi, n + 1)[:-1])
    nodes = np.concatenate([*pieces, [float(R)]])
    return Grid(nodes, bps)


def grid_for(problem, M: int = 2000) -> Grid:
    return uniform_grid(problem.R, M, problem.weight.breakpoints)


def graded_grid(R: float, M: int, density_r, density, breakpoints=()) -> Grid:
    """Nodes equidistributing a positive density sampled at density_r.

    Breakpoints are kept as nodes; each segment gets a share of M
    proportional to its integrated density.
    """
    density_r = np.asarray(density_r, float)
    density = np.asarray(density, float)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(density_r))])
    bps = [float(b) for b in breakpoints if 0.0 < b < R]
    edges = np.array([0.0, *bps, float(R)])
    mass = np.interp(edges, density_r, cum)
    total = mass[-1] - mass[0]
    pieces = []
    for i in range(len(edges) - 1):
        n = max(3, int(round(M * (mass[i + 1] - mass[i]) / total)))
        levels = np.linspace(mass[i], mass[i + 1], n + 1)[:-1]
        pts = np.interp(levels, cum, density_r)
        pts[0] = edges[i]
        pieces.append(pts)
    nodes = np.concatenate([*pieces, [float(R)]])
    # guard against coincident nodes from flat spots in cum
    keep = np.concatenate([[True], np.diff(nodes) > 1e-14 * R])
    return Grid(nodes[keep], bps)
