"""Central-difference gradient check shared by unit and acceptance tests."""

import numpy as np

from stylometrics.learn import init_params, loss_and_grad


def max_relative_error(seed=0, probes_per_layer=5, n=12, n_features=5, n_classes=4,
                       l2_lambda=0.01, h=1e-6):
    rng = np.random.default_rng(seed)
    params = init_params([n_features, 100, 25, n_classes], rng)
    params = [p + 0.1 * rng.standard_normal(p.shape) for p in params]  # non-zero biases too
    X = rng.standard_normal((n, n_features))
    Y = np.eye(n_classes)[rng.integers(0, n_classes, n)]
    _, grads = loss_and_grad(params, X, Y, l2_lambda)
    worst = 0.0
    for layer, (p, g) in enumerate(zip(params, grads)):
        for _ in range(probes_per_layer):
            idx = tuple(int(rng.integers(s)) for s in p.shape)
            orig = p[idx]
            p[idx] = orig + h
            up, _ = loss_and_grad(params, X, Y, l2_lambda)
            p[idx] = orig - h
            down, _ = loss_and_grad(params, X, Y, l2_lambda)
            p[idx] = orig
            numeric = (up - down) / (2 * h)
            denom = max(abs(numeric), abs(g[idx]), 1e-8)
            worst = max(worst, abs(numeric - g[idx]) / denom)
    return worst
