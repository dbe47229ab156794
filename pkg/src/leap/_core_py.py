"""Pure numpy implementations of the kernels in ``_core.pyx``."""
import numpy as np

BACKEND = "python"


def velocity_update(v, x, lbest, gbest, omega, vmax):
    pull = np.where(lbest == x, 1.0, -1.0) + np.where(gbest == x, 1.0, -1.0)
    np.clip(omega * v + vmax * (1.0 - omega) * pull, -vmax, vmax, out=v)


def adoption_probabilities(v, out):
    n = v.shape[0]
    if n == 0:
        return
    e = np.exp(v - v.max())
    np.minimum(n * e / e.sum(), 1.0, out=out)


def apply_moves(x, target, prob, u, changed, max_changes):
    for d in np.flatnonzero((x != target) & (u < prob)):
        if x[d] == 0:
            if changed + 1 > max_changes:
                continue
            changed += 1
        elif target[d] == 0:
            changed -= 1
        x[d] = target[d]
    return changed


def linear_scores(weights, idx, out):
    rows = idx[idx >= 0]
    out[:] = weights[rows].sum(axis=0) if rows.size else 0.0


def softmax(scores, out):
    if scores.shape[0] == 0:
        return
    e = np.exp(scores - scores.max())
    out[:] = e / e.sum()
