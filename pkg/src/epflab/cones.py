"""Geometry of the Lorentz cone and the PSD cone.

A Lorentz point is a plain 1-D array ``y`` with head ``y[0]`` and tail
``y[1:]``; membership in Q_{l+1} means ``y[0] >= ||y[1:]||``.  Symmetric
matrices are 2-D arrays.
"""

from __future__ import annotations

import math

import numpy as np

from .numerics import eig_sym, sym

LORENTZ_MEMBER_TOL = 1e-12
PSD_MEMBER_TOL = 1e-8


def in_lorentz(y, tol: float = LORENTZ_MEMBER_TOL) -> bool:
    y = np.asarray(y, dtype=float)
    return y[0] >= np.linalg.norm(y[1:]) - tol


def proj_lorentz(y) -> np.ndarray:
    """Euclidean projection onto the second-order cone.

    Three cases: already in the cone (fixed), in the polar cone
    (maps to the origin; the boundary ray ||tail|| = -head is classified
    here so the tail never gets normalized at zero), and the generic
    closed form otherwise.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 2:
        raise ValueError("Lorentz point needs total dimension >= 2")
    head = y[0]
    tail_norm = float(np.linalg.norm(y[1:]))
    if head >= tail_norm:
        return y.astype(float, copy=True)
    if head <= -tail_norm:
        return np.zeros_like(y, dtype=float)
    coef = 0.5 * (head + tail_norm)
    out = np.empty_like(y, dtype=float)
    out[0] = coef
    out[1:] = (coef / tail_norm) * y[1:]
    return out


def dist_lorentz(y) -> float:
    """Distance from y to the second-order cone."""
    y = np.asarray(y, dtype=float)
    return float(np.linalg.norm(y - proj_lorentz(y)))


def moreau_check(y) -> float:
    """Residual of the Moreau decomposition y = proj_K(y) + proj_{-K}(y).

    The Lorentz cone is self-dual, so the polar projection is
    -proj_K(-y).  The residual should vanish to roundoff for every y.
    """
    y = np.asarray(y, dtype=float)
    polar_part = -proj_lorentz(-y)
    return float(np.linalg.norm(y - proj_lorentz(y) - polar_part))


def proj_psd(a) -> np.ndarray:
    """Projection [A]_+ onto the positive semidefinite cone."""
    a = sym(a)
    decomp = eig_sym(a)
    clipped = np.maximum(decomp.values, 0.0)
    return sym((decomp.vectors * clipped) @ decomp.vectors.T)


def dist_psd_minus(a) -> float:
    """Distance from A to the negative semidefinite cone.

    Equals the Frobenius norm of [A]_+, i.e. dist^2 = trace([A]_+^2).
    """
    return float(np.linalg.norm(proj_psd(a)))


def in_psd_minus(a, tol: float = PSD_MEMBER_TOL) -> bool:
    decomp = eig_sym(sym(a))
    return float(decomp.values[-1]) <= tol


def is_psd(a, tol: float = PSD_MEMBER_TOL) -> bool:
    decomp = eig_sym(sym(a))
    return float(decomp.values[0]) >= -tol


def lorentz_block_dims(total: int, blocks) -> None:
    """Validate a direct-product cone layout: every block dimension >= 2."""
    if any(b < 2 for b in blocks):
        raise ValueError("every Lorentz block needs dimension >= 2")
    if sum(blocks) != total:
        raise ValueError("block dimensions do not sum to the total dimension")


def split_blocks(y, blocks) -> list:
    """Split a stacked vector into per-block Lorentz points."""
    y = np.asarray(y, dtype=float)
    lorentz_block_dims(y.shape[0], blocks)
    out = []
    offset = 0
    for b in blocks:
        out.append(y[offset : offset + b])
        offset += b
    return out
