"""Hard k-means responsibilities used to start a variational fit."""

import numpy as np

__all__ = ["kmeans", "kmeans_init"]


def _sq_dist(X, centers):
    # ||x||^2 - 2 x.c + ||c||^2, clipped against round-off
    d = (np.sum(X * X, axis=1)[:, None] - 2.0 * X @ centers.T
         + np.sum(centers * centers, axis=1)[None, :])
    return np.maximum(d, 0.0)


def _plusplus(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = _sq_dist(X, centers[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            i = rng.choice(n, p=closest / total)
        else:
            i = rng.integers(n)
        centers[j] = X[i]
        closest = np.minimum(closest, _sq_dist(X, centers[j:j + 1])[:, 0])
    return centers


def _fill_empty(labels, dist, k):
    """Move the farthest points into empty clusters, one point per cluster."""
    n = labels.shape[0]
    own = dist[np.arange(n), labels]
    for j in range(k):
        if np.any(labels == j):
            continue
        sizes = np.bincount(labels, minlength=k)
        movable = sizes[labels] > 1
        cand = np.where(movable, own, -np.inf)
        i = int(np.argmax(cand))
        labels[i] = j
        own[i] = 0.0
    return labels


def kmeans(X, k, seed=None, max_iter=300):
    """Lloyd's algorithm with k-means++ seeding.

    Returns ``(labels, centers)``. Every cluster is non-empty on return.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        raise ValueError(f"need at least k={k} observations, got N={n}")
    rng = np.random.default_rng(seed)
    centers = _plusplus(X, k, rng)
    labels = None
    for _ in range(max_iter):
        dist = _sq_dist(X, centers)
        new = _fill_empty(np.argmin(dist, axis=1), dist, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.array([X[labels == j].mean(axis=0) for j in range(k)])
    return labels, centers


def kmeans_init(X, M, seed=None):
    """One-hot ``(N, M)`` responsibilities from :func:`kmeans`."""
    labels, _ = kmeans(X, M, seed)
    r = np.zeros((labels.shape[0], M))
    r[np.arange(labels.shape[0]), labels] = 1.0
    return r
