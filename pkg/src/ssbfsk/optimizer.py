"""Brute-force design-space search with weak-Pareto front extraction.

Objectives per configuration (M, h, L, w): f1 = 10*log10(dmin^2/2) in dB and
f2 = 1/(B*Tb), both to be maximized.  A point is kept when no other point
beats it strictly in *every* objective (weak Pareto optimality).
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import distance, spectrum
from .modulator import CpmScheme
from .pulses import LORENTZIAN, PulseSpec, lorentzian_pulse

WLIM_EPS = 0.1
WLIM_REFERENCE_W = 1000.0
WLIM_GRID_POINTS = 4096


def w_lim(L: int, Ts: float = 1.0) -> float:
    """Width beyond which the Lorentzian pulse stops changing materially.

    Smallest w on the 0.1 grid whose pulse sits within 10% relative 2-norm of
    the effectively-flat w=1000 pulse sampled on the same grid; widths above
    it produce nearly identical pulses, so the search space is capped there.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    t = np.linspace(0.0, L * Ts, WLIM_GRID_POINTS)
    c = L * Ts / 2.0

    def pulse(w):
        mu = np.pi / (2.0 * np.arctan(L * Ts / (2.0 * w)))
        return mu * 2.0 * w / ((t - c) ** 2 + w ** 2)

    ref = pulse(WLIM_REFERENCE_W)
    ref_norm = np.linalg.norm(ref)
    k = 1
    while True:
        w = round(0.1 * k, 10)
        if np.linalg.norm(pulse(w) - ref) / ref_norm <= WLIM_EPS:
            return w
        k += 1


@dataclass(frozen=True)
class ParetoPoint:
    """One evaluated configuration with objectives and raw metrics."""

    M: int
    h: float
    L: int
    w: float
    dmin_sq: float
    btb: float
    ssb_loss_percent: float
    N_used: int

    @property
    def params(self) -> tuple:
        return (self.M, self.h, self.L, self.w)

    @property
    def f1(self) -> float:
        return 10.0 * np.log10(self.dmin_sq / 2.0)

    @property
    def f2(self) -> float:
        return 1.0 / self.btb


@dataclass(frozen=True)
class DesignSpace:
    """Grid of configurations to sweep.

    ``w_values`` may be given per L; otherwise w runs from 0.1 in ``w_step``
    increments up to w_lim(L).
    """

    h_values: tuple
    L_values: tuple
    M_values: tuple = (2,)
    w_step: float = 0.1
    w_values: tuple = ()
    occupancy_fraction: float = 0.99
    extra_points: tuple = ()  # explicit (M, h, L, w) tuples appended to the grid

    @classmethod
    def desk(cls, M_values=(2,), fraction=0.99) -> "DesignSpace":
        """Coarse grid that finishes on a workstation."""
        return cls(h_values=tuple(np.round(np.arange(0.05, 2.0001, 0.05), 10)),
                   L_values=(2, 3, 5, 6), M_values=tuple(M_values),
                   w_step=0.4, occupancy_fraction=fraction)

    @classmethod
    def full(cls, M_values=(2, 4, 8), fraction=0.99) -> "DesignSpace":
        """The complete published search grid (hours to days of compute)."""
        return cls(h_values=tuple(np.round(np.arange(0.01, 2.0001, 0.01), 10)),
                   L_values=tuple(range(2, 13)), M_values=tuple(M_values),
                   w_step=0.1, occupancy_fraction=fraction)

    @classmethod
    def from_dict(cls, doc: dict) -> "DesignSpace":
        allowed = {"h_values", "L_values", "M_values", "w_step", "w_values",
                   "occupancy_fraction", "extra_points"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValueError(f"unknown design-space keys: {sorted(unknown)}")
        doc = dict(doc)
        for key in ("h_values", "L_values", "M_values", "w_values"):
            if key in doc:
                doc[key] = tuple(doc[key])
        if "extra_points" in doc:
            doc["extra_points"] = tuple(tuple(p) for p in doc["extra_points"])
        return cls(**doc)

    def w_grid(self, L: int) -> tuple:
        if self.w_values:
            return self.w_values
        lim = w_lim(L)
        n = int(np.floor((lim - 0.1) / self.w_step + 1e-9)) + 1
        return tuple(np.round(0.1 + self.w_step * np.arange(n), 10))

    def configs(self):
        """All parameter tuples in deterministic lexicographic order."""
        out = []
        for M in self.M_values:
            for L in self.L_values:
                for w in self.w_grid(L):
                    for h in self.h_values:
                        out.append((M, float(h), L, float(w)))
        out.extend((int(M), float(h), int(L), float(w)) for M, h, L, w in self.extra_points)
        return sorted(set(out))


def evaluate_scheme(scheme: CpmScheme, occupancy_fraction: float = 0.99,
                    m: int = 3, N_max: int = 30, w: float = 0.0) -> ParetoPoint:
    """Distance, occupancy and sideband metrics for an arbitrary scheme."""
    dres = distance.d_min(scheme, m=m, N_max=N_max)
    est = spectrum.psd(scheme)
    occ = spectrum.occupancy(est, occupancy_fraction, scheme.M)
    return ParetoPoint(M=scheme.M, h=float(scheme.h), L=scheme.L, w=float(w),
                       dmin_sq=float(dres.d_squared),
                       btb=float(occ.btb[occupancy_fraction]),
                       ssb_loss_percent=float(occ.ssb_loss_percent),
                       N_used=int(dres.N_used))


def evaluate_config(params: tuple, occupancy_fraction: float = 0.99,
                    samples_per_symbol: int = 64, m: int = 3,
                    N_max: int = 30) -> ParetoPoint:
    """Distance, occupancy and sideband metrics for one (M, h, L, w) tuple."""
    M, h, L, w = params
    pulse = lorentzian_pulse(PulseSpec(LORENTZIAN, L=int(L), w=float(w)),
                             samples_per_symbol)
    scheme = CpmScheme(M=int(M), h=float(h), pulse=pulse)
    return evaluate_scheme(scheme, occupancy_fraction, m, N_max, w=float(w))


def pareto_front(points) -> list[ParetoPoint]:
    """Weak Pareto set: points no rival beats strictly in both objectives.

    Sorted by f2 ascending on return.
    """
    pts = list(points)
    if not pts:
        return []
    f1 = np.array([p.f1 for p in pts])
    f2 = np.array([p.f2 for p in pts])
    order = np.lexsort((-f2, -f1))  # f1 descending, then f2 descending
    keep = np.zeros(len(pts), dtype=bool)
    best_f2 = -np.inf
    i = 0
    while i < len(order):
        # group of equal f1: dominance needs strictly larger f1, so only the
        # groups processed earlier can eliminate members of this one
        j = i
        while j < len(order) and f1[order[j]] == f1[order[i]]:
            j += 1
        for k in order[i:j]:
            keep[k] = not (best_f2 > f2[k])
        best_f2 = max(best_f2, float(f2[order[i:j]].max()))
        i = j
    front = [p for p, k in zip(pts, keep) if k]
    front.sort(key=lambda p: p.f2)
    return front


def filter_reference(front, reference: ParetoPoint) -> list[ParetoPoint]:
    """Points at least as good as the reference in both raw metrics."""
    return [p for p in front
            if p.dmin_sq >= reference.dmin_sq and p.btb <= reference.btb]


CHECKPOINT_FIELDS = ("M", "h", "L", "w", "dmin2", "btb", "ssb_loss", "N_used")


def _key(params) -> str:
    M, h, L, w = params
    return f"{int(M)}|{h:.6f}|{int(L)}|{w:.6f}"


def _load_checkpoint(path: str) -> dict:
    done = {}
    if not path or not os.path.exists(path):
        return done
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0] == "M":
                continue
            M, h, L, w = int(row[0]), float(row[1]), int(row[2]), float(row[3])
            done[_key((M, h, L, w))] = ParetoPoint(
                M=M, h=h, L=L, w=w, dmin_sq=float(row[4]), btb=float(row[5]),
                ssb_loss_percent=float(row[6]), N_used=int(row[7]))
    return done


def run_grid(space: DesignSpace, checkpoint: str | None = None,
             jobs: int = 1, progress=None) -> list[ParetoPoint]:
    """Evaluate every configuration, resuming from an append-only checkpoint.

    Results are returned in grid order regardless of completion order, so
    repeated runs are bit-identical.
    """
    todo = space.configs()
    done = _load_checkpoint(checkpoint) if checkpoint else {}
    missing = [p for p in todo if _key(p) not in done]
    fh = None
    writer = None
    if checkpoint:
        new_file = not os.path.exists(checkpoint)
        fh = open(checkpoint, "a", newline="")
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(CHECKPOINT_FIELDS)

    def record(params, pt):
        done[_key(params)] = pt
        if writer:
            writer.writerow([pt.M, pt.h, pt.L, pt.w, repr(float(pt.dmin_sq)),
                             repr(float(pt.btb)), repr(float(pt.ssb_loss_percent)),
                             pt.N_used])
            fh.flush()
        if progress:
            progress(len(done), len(todo))

    frac = space.occupancy_fraction
    try:
        if jobs > 1 and missing:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                for params, pt in zip(missing, ex.map(_eval_star,
                                                      [(p, frac) for p in missing],
                                                      chunksize=8)):
                    record(params, pt)
        else:
            for params in missing:
                record(params, evaluate_config(params, frac))
    finally:
        if fh:
            fh.close()
    return [done[_key(p)] for p in todo]


def _eval_star(args):
    return evaluate_config(args[0], args[1])
