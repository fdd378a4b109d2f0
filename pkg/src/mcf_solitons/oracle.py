"""Generic fundamental-form curvature from the point map alone.

Used to cross-check the specialized formulas.  Nothing here touches the
family-specific derivative closures: only ``X(s, u)`` is sampled, with
fourth-order central stencils.
"""

import numpy as np


def _partials(X, s, u, h):
    P = lambda a, b: np.asarray(X(s + a * h, u + b * h), dtype=float)
    c1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    k = (-2, -1, 0, 1, 2)
    Xs = sum(c * P(i, 0) for c, i in zip(c1, k))
    Xu = sum(c * P(0, i) for c, i in zip(c1, k))
    Xss = sum(c * P(i, 0) for c, i in zip(c2, k))
    Xuu = sum(c * P(0, i) for c, i in zip(c2, k))
    Xsu = sum(ci * cj * P(i, j) for ci, i in zip(c1, k) for cj, j in zip(c1, k))
    return Xs, Xu, Xss, Xsu, Xuu


def fundamental_forms(X, s, u, h=1e-3):
    """Return ``(E, F, G, e, f, g, N)`` with ``N = X_s ^ X_u / |.|``."""
    Xs, Xu, Xss, Xsu, Xuu = _partials(X, s, u, h)
    n = np.cross(Xs, Xu)
    N = n / np.linalg.norm(n)
    E, F, G = Xs @ Xs, Xs @ Xu, Xu @ Xu
    e, f, g = Xss @ N, Xsu @ N, Xuu @ N
    return E, F, G, e, f, g, N


def curvatures(X, s, u, h=1e-3, orient=None):
    """Mean and Gaussian curvature ``(H, K, N)``.

    ``H = (eG - 2fF + gE) / (2(EG - F^2))`` with respect to ``N``; pass
    ``orient`` to flip ``N`` (and ``H``) onto another normal's side.
    """
    E, F, G, e, f, g, N = fundamental_forms(X, s, u, h)
    det = E * G - F * F
    H = (e * G - 2.0 * f * F + g * E) / (2.0 * det)
    K = (e * g - f * f) / det
    if orient is not None and float(np.dot(orient, N)) < 0:
        H, N = -H, -N
    return H, K, N
