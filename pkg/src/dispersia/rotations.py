"""
SO(3) geometry used throughout the package.

Rotations and generators are plain ``(3, 3)`` float arrays. The generator set
is the box of antisymmetric matrices with entries bounded by one; geodesics
through a pair ``(U, V)`` are ``t -> (exp(tA) U, exp(tB) V)``.
"""

import numpy as np
from scipy.spatial.transform import Rotation as _ScipyRotation

ORTHO_TOL = 1e-10


class RotationError(ValueError):
    """Raised when a matrix fails the SO(3) or generator checks."""


def check_rotation(R, tol=ORTHO_TOL):
    """Validate and return ``R`` as a float ``(3, 3)`` array.

    Raises
    ------
    RotationError
        If ``R`` is not orthogonal with unit determinant to within ``tol``.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        raise RotationError(f"expected a finite 3x3 matrix, got shape {R.shape}")
    if np.max(np.abs(R.T @ R - np.eye(3))) > tol:
        raise RotationError("matrix is not orthogonal")
    det = np.linalg.det(R)
    if abs(det - 1.0) > tol:
        raise RotationError(f"determinant {det!r} is not 1")
    return R


def is_rotation(R, tol=ORTHO_TOL):
    try:
        check_rotation(R, tol)
    except RotationError:
        return False
    return True


def check_generator(A):
    """Validate membership of ``A`` in the bounded generator box."""
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3):
        raise RotationError(f"generator must be 3x3, got {A.shape}")
    if np.any(A + A.T != 0.0):
        raise RotationError("generator is not antisymmetric")
    if np.max(np.abs(A)) > 1.0:
        raise RotationError("generator entries exceed 1 in magnitude")
    return A


def hat(w):
    """Antisymmetric matrix of the cross product with ``w``."""
    x, y, z = w
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(A):
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def exp_map(A, t=1.0):
    """Rodrigues closed form of ``exp(t A)`` for antisymmetric ``A``."""
    A = np.asarray(A, dtype=float)
    w = t * vee(A)
    theta = np.sqrt(w @ w)
    K = hat(w)
    if theta < 1e-8:
        # Taylor coefficients of sin(x)/x and (1-cos x)/x^2
        a = 1.0 - theta**2 / 6.0
        b = 0.5 - theta**2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * K + b * (K @ K)


def log_map(R):
    """Antisymmetric ``A`` with ``exp(A) = R`` and rotation angle in [0, pi]."""
    rotvec = _ScipyRotation.from_matrix(np.asarray(R, dtype=float)).as_rotvec()
    return hat(rotvec)


def rotation_angle(R):
    """Geodesic distance from the identity (angle in [0, pi])."""
    c = (np.trace(R) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def relative_angle(R1, R2):
    return rotation_angle(R2 @ R1.T)


def pair_distance(U1, V1, U2, V2):
    """Product-metric geodesic distance on SO(3) x SO(3)."""
    return float(np.hypot(relative_angle(U1, U2), relative_angle(V1, V2)))


def geodesic(R0, R1, s):
    """Point at fraction ``s`` of the left-invariant geodesic from R0 to R1."""
    return exp_map(log_map(R1 @ R0.T), s) @ R0


def axis_generators():
    """The three coordinate generators, entries in {-1, 0, 1}."""
    return [hat(e) for e in np.eye(3)]


def generator_basis():
    """Six generator pairs ``(A, B)``: each axis generator in one slot, zero in the other."""
    zero = np.zeros((3, 3))
    basis = [(A, zero) for A in axis_generators()]
    basis += [(zero, B) for B in axis_generators()]
    return basis


def random_generator_pairs(k, rng):
    """``k`` pairs drawn uniformly from the generator box, for mixed directions."""
    pairs = []
    for _ in range(k):
        a, b = rng.uniform(-1.0, 1.0, size=(2, 3))
        pairs.append((hat(a), hat(b)))
    return pairs


def quaternion_to_matrix(q):
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def sample_rotations(n, rng):
    """Haar-distributed rotations from normalized Gaussian quaternions, shape ``(n, 3, 3)``."""
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q.T
    R = np.empty((n, 3, 3))
    R[:, 0, 0] = 1 - 2 * (y * y + z * z)
    R[:, 0, 1] = 2 * (x * y - w * z)
    R[:, 0, 2] = 2 * (x * z + w * y)
    R[:, 1, 0] = 2 * (x * y + w * z)
    R[:, 1, 1] = 1 - 2 * (x * x + z * z)
    R[:, 1, 2] = 2 * (y * z - w * x)
    R[:, 2, 0] = 2 * (x * z - w * y)
    R[:, 2, 1] = 2 * (y * z + w * x)
    R[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def sample_so3_pairs(n, seed):
    """Deterministic list of ``n`` Haar pairs ``(U, V)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    U = sample_rotations(n, rng)
    V = sample_rotations(n, rng)
    return list(zip(U, V))


def directional_derivatives(f, U, V, A, B, order=1, h=1e-3):
    """Derivative of ``t -> f(exp(tA) U, exp(tB) V)`` at ``t = 0``.

    Central differences at steps ``h`` and ``h/2`` combined by one Richardson
    step.

    Returns
    -------
    value : float
    error : float
        Difference between the extrapolated and the finer raw estimate.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")

    def g(t):
        val = f(exp_map(A, t) @ U, exp_map(B, t) @ V)
        if not np.isfinite(val):
            raise FloatingPointError(f"non-finite function value at t={t!r}")
        return val

    def central(step):
        if order == 1:
            return (g(step) - g(-step)) / (2.0 * step)
        return (g(step) - 2.0 * g(0.0) + g(-step)) / step**2

    coarse = central(h)
    fine = central(h / 2.0)
    value = (4.0 * fine - coarse) / 3.0
    return float(value), float(abs(value - fine))


def rotation_to_list(R):
    """Nested 3x3 list of rows for JSON."""
    return [[float(v) for v in row] for row in np.asarray(R, dtype=float).reshape(3, 3)]


def rotation_from_list(values):
    """Inverse of :func:`rotation_to_list`; a flat row-major list of 9 is accepted too."""
    return check_rotation(np.asarray(values, dtype=float).reshape(3, 3))


def rotation_about(axis, angle):
    axis = np.asarray(axis, dtype=float)
    return exp_map(hat(axis / np.linalg.norm(axis)), angle)


def exp_map_batch(A, ts):
    """``exp(t A)`` for every ``t`` in ``ts``, shape ``(len(ts), 3, 3)``."""
    w = vee(np.asarray(A, dtype=float))
    ts = np.asarray(ts, dtype=float)
    norm = np.sqrt(w @ w)
    theta = np.abs(ts) * norm
    K = hat(w)
    small = theta < 1e-8
    safe = np.where(small, 1.0, theta)
    a = np.where(small, ts * (1.0 - theta**2 / 6.0), np.sin(safe) / safe * ts)
    b = np.where(small, ts**2 * (0.5 - theta**2 / 24.0), (1.0 - np.cos(safe)) / safe**2 * ts**2)
    return np.eye(3) + a[:, None, None] * K + b[:, None, None] * (K @ K)


def pairwise_angles(Rs, Ss=None):
    """Matrix of relative rotation angles between two stacks of rotations."""
    Ss = Rs if Ss is None else Ss
    tr = np.asarray(Rs).reshape(len(Rs), 9) @ np.asarray(Ss).reshape(len(Ss), 9).T
    return np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))


def rodrigues_batch(w):
    """``exp(hat(w))`` for a stack of rotation vectors ``w (..., 3)``."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w, axis=-1)
    small = theta < 1e-8
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
    K = np.zeros(w.shape[:-1] + (3, 3))
    K[..., 0, 1], K[..., 0, 2] = -w[..., 2], w[..., 1]
    K[..., 1, 0], K[..., 1, 2] = w[..., 2], -w[..., 0]
    K[..., 2, 0], K[..., 2, 1] = -w[..., 1], w[..., 0]
    return np.eye(3) + a[..., None, None] * K + b[..., None, None] * (K @ K)


def geodesic_batch(R0, R1, s):
    """Points ``exp(s log(R1 R0^T)) R0`` for stacks ``R0, R1 (N,3,3)``; shape ``(N, len(s), 3, 3)``."""
    R0, R1 = np.asarray(R0, dtype=float), np.asarray(R1, dtype=float)
    rel = R1 @ np.swapaxes(R0, 1, 2)
    rotvec = _ScipyRotation.from_matrix(rel).as_rotvec()
    s = np.asarray(s, dtype=float)
    return rodrigues_batch(rotvec[:, None, :] * s[None, :, None]) @ R0[:, None]
