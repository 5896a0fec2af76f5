"""Independent reference computations used by the tests.

Every signal is written as a row vector of coefficients on a set of
independent standard normals, so a covariance is just ``A @ A.T``. Nothing
here uses the closed-form moment expressions of the package; the only shared
ingredients are the coding rules themselves (how X, U and T are formed).
"""

from __future__ import annotations

import math

import numpy as np


def lmmse(target: np.ndarray, observations: list[np.ndarray]) -> float:
    """MSE of the best linear estimate of ``target`` from ``observations``."""
    A = np.vstack(observations)
    cov_oo = A @ A.T
    cov_to = A @ target
    # drop observations that carry nothing (all-zero rows)
    keep = np.abs(np.diag(cov_oo)) > 0
    cov_oo, cov_to = cov_oo[np.ix_(keep, keep)], cov_to[keep]
    if cov_to.size == 0:
        return float(target @ target)
    return float(target @ target - cov_to @ np.linalg.solve(cov_oo, cov_to))


class Signals:
    """Signals of the single-user system over the basis
    ``(w_v, w_innov, w_h, w_z, w_b)``."""

    DIM = 5

    def __init__(self, sv2, ss2, rho, p, n_design, gamma, pa, n_actual=None):
        e = np.eye(self.DIM)
        sv, ss = math.sqrt(sv2), math.sqrt(ss2)
        self.sv2 = sv2
        self.v = sv * e[0]
        self.s = rho * ss * e[0] + math.sqrt(max(1 - rho * rho, 0.0)) * ss * e[1]
        mix = gamma * self.v + (1 - gamma) * self.s
        power = mix @ mix
        self.x_a = math.sqrt(pa / power) * mix if pa > 0 and power > 0 else np.zeros(self.DIM)
        self.p_h = p - pa
        self.x_h = math.sqrt(self.p_h) * e[2]
        self.n_design = n_design
        n_actual = n_design if n_actual is None else n_actual
        self.y_design = self.x_a + self.s + self.x_h + math.sqrt(n_design) * e[3]
        self.y = self.x_a + self.s + self.x_h + math.sqrt(n_actual) * e[3]
        self.e_b = e[4]

    def d_star(self, actual: bool = False) -> float:
        return lmmse(self.v, [self.y if actual else self.y_design])

    def d_sep(self) -> float:
        return self.d_star() / (1 + self.p_h / self.n_design)

    def hda(self, actual: bool = False) -> float:
        """HDA distortion with coefficients designed at the design noise."""
        if self.p_h == 0:
            return self.d_star(actual)
        d_star = self.d_star()
        alpha = self.p_h / (self.p_h + self.n_design)
        kappa = math.sqrt(self.p_h**2 / ((self.p_h + self.n_design) * d_star))
        u = self.x_h + alpha * (self.x_a + self.s) + kappa * self.v
        return lmmse(self.v, [u, self.y if actual else self.y_design])

    def digital(self, actual: bool = False) -> float:
        """Digital refinement as the test channel ``T = a V + B``."""
        d_star, d = self.d_star(), self.d_sep()
        t = math.sqrt(max((d_star - d) / d_star, 0.0)) * self.v + math.sqrt(d) * self.e_b
        return lmmse(self.v, [t, self.y if actual else self.y_design])


def cognitive_distortions(cfg, gamma: float, pa: float) -> tuple[float, float]:
    """(D1, D2) of the proposed cognitive scheme over the basis
    ``(w_1, w_innov, w_h, w_z1, w_z2)``."""
    e = np.eye(5)
    s1, s2 = math.sqrt(cfg.sigma_v1_2), math.sqrt(cfg.sigma_v2_2)
    v1 = s1 * e[0]
    v2 = cfg.rho * s2 * e[0] + math.sqrt(1 - cfg.rho**2) * s2 * e[1]
    x1 = math.sqrt(cfg.p1) * e[0]
    s = cfg.h1 * x1
    mix = gamma * v2 + (1 - gamma) * s
    power = mix @ mix
    x_a = math.sqrt(pa / power) * mix if pa > 0 and power > 0 else np.zeros(5)
    p_h = cfg.p2 - pa
    x_h = math.sqrt(p_h) * e[2]
    x2 = x_a + x_h
    y1 = x1 + cfg.h2 * x2 + math.sqrt(cfg.n1) * e[3]
    y2 = s + x2 + math.sqrt(cfg.n2) * e[4]
    d1 = lmmse(v1, [y1])
    d_star = lmmse(v2, [y2])
    if p_h == 0:
        return d1, d_star
    alpha = p_h / (p_h + cfg.n2)
    kappa = math.sqrt(p_h**2 / ((p_h + cfg.n2) * d_star))
    u = x_h + alpha * (x_a + s) + kappa * v2
    return d1, lmmse(v2, [u, y2])


def pareto_bruteforce(d1: np.ndarray, d2: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Quadratic-time dominance check, vectorized in blocks of rows."""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    keep = np.ones(d1.size, dtype=bool)
    for start in range(0, d1.size, chunk):
        a1 = d1[start:start + chunk, None]
        a2 = d2[start:start + chunk, None]
        dominated = ((d1[None, :] <= a1) & (d2[None, :] <= a2)
                     & ((d1[None, :] < a1) | (d2[None, :] < a2))).any(axis=1)
        keep[start:start + chunk] = ~dominated
    return keep
