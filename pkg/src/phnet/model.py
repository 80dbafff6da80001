"""Core types for a single 1-D port-Hamiltonian subsystem.

A subsystem is the evolution law

    dx/dt = sum_{k=0}^{N} P_k d^k(H x)/dz^k          on z in (0, 1),

with Hermitian coercive energy density H(z), matrices satisfying
P_k^* = (-1)^{k+1} P_k for k >= 1, invertible P_N, and boundary
input/output maps read off the trace vector

    tau(y) = (y(1), y'(1), ..., y^(N-1)(1), y(0), ..., y^(N-1)(0)),
    y = H x,

through matrices W_B, W_C with [W_B; W_C] invertible.  Physical
intervals (a, b) are rescaled to (0, 1) on construction, multiplying
P_k by (b - a)^(-k).
"""

import numpy as np
from dataclasses import dataclass, field


class PHStructuralError(ValueError):
    """Shape or representation mismatch, as opposed to a failed invariant."""


def _as_matrix(m, dtype=None):
    a = np.array(m, dtype=dtype)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        raise PHStructuralError("expected a 2-d matrix, got shape %s" % (a.shape,))
    a.setflags(write=False)
    return a


class MatrixFunction:
    """Matrix-valued coefficient on [0, 1] in one of three representations.

    kind = "constant":    data is a single d x d matrix.
    kind = "polynomial":  data has shape (deg+1, d, d), ascending powers of z.
    kind = "samples":     data has shape (n_s, d, d), n_s >= 2, piecewise
                          linear between uniform sample points on [0, 1].

    Used for the Hamiltonian density H and for spatially varying P_0.
    """

    def __init__(self, kind, data):
        if kind not in ("constant", "polynomial", "samples"):
            raise PHStructuralError("unknown MatrixFunction kind %r" % (kind,))
        data = np.asarray(data)
        if kind == "constant":
            if data.ndim != 2 or data.shape[0] != data.shape[1]:
                raise PHStructuralError("constant data must be square, got %s" % (data.shape,))
        else:
            if data.ndim != 3 or data.shape[1] != data.shape[2]:
                raise PHStructuralError("%s data must have shape (m, d, d), got %s"
                                        % (kind, data.shape))
            if kind == "samples" and data.shape[0] < 2:
                raise PHStructuralError("sampled representation needs >= 2 sample points")
        data = data.astype(complex) if np.iscomplexobj(data) else data.astype(float)
        data.setflags(write=False)
        self.kind = kind
        self.data = data

    @classmethod
    def constant(cls, mat):
        return cls("constant", np.atleast_2d(mat))

    @classmethod
    def polynomial(cls, coeffs):
        return cls("polynomial", coeffs)

    @classmethod
    def samples(cls, values):
        return cls("samples", values)

    @property
    def dim(self):
        return self.data.shape[-1]

    def __call__(self, z):
        """Evaluate at points z (scalar or 1-d array); returns (len(z), d, d)."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.kind == "constant":
            return np.broadcast_to(self.data, (len(z),) + self.data.shape).copy()
        if self.kind == "polynomial":
            out = np.zeros((len(z),) + self.data.shape[1:], dtype=self.data.dtype)
            for p in range(self.data.shape[0] - 1, -1, -1):
                out = out * z[:, None, None] + self.data[p]
            return out
        # piecewise linear between uniform samples
        n_s = self.data.shape[0]
        t = np.clip(z, 0.0, 1.0) * (n_s - 1)
        i0 = np.minimum(t.astype(int), n_s - 2)
        w = (t - i0)[:, None, None]
        return (1.0 - w) * self.data[i0] + w * self.data[i0 + 1]

    def hermitian_defect(self, z_grid=None):
        """Max entrywise deviation from Hermitian symmetry over a grid."""
        if z_grid is None:
            z_grid = np.linspace(0.0, 1.0, 129)
        vals = self(z_grid)
        return float(np.max(np.abs(vals - vals.conj().transpose(0, 2, 1))))

    def lipschitz_slope(self, z_grid=None):
        """Finite-difference slope surrogate for the Lipschitz constant."""
        if z_grid is None:
            z_grid = np.linspace(0.0, 1.0, 257)
        vals = self(z_grid)
        dz = np.diff(z_grid)
        steps = np.abs(np.diff(vals, axis=0)).max(axis=(1, 2)) / dz
        return float(steps.max()) if len(steps) else 0.0

    def min_eig(self, z_grid):
        vals = self(z_grid)
        vals = 0.5 * (vals + vals.conj().transpose(0, 2, 1))
        return float(min(np.linalg.eigvalsh(v).min() for v in vals))

    def max_sym_eig(self, z_grid):
        vals = self(z_grid)
        vals = 0.5 * (vals + vals.conj().transpose(0, 2, 1))
        return float(max(np.linalg.eigvalsh(v).max() for v in vals))

    def to_dict(self):
        return {"kind": self.kind, "data": _encode_array(self.data)}

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        depth = 2 if kind == "constant" else 3
        return cls(kind, _decode_array(d["data"], depth))


def as_matrix_function(value, dim=None):
    """Coerce a scalar, matrix, or MatrixFunction into a MatrixFunction."""
    if isinstance(value, MatrixFunction):
        return value
    a = np.asarray(value, dtype=float if not np.iscomplexobj(value) else complex)
    if a.ndim == 0:
        d = 1 if dim is None else dim
        return MatrixFunction.constant(np.eye(d) * complex(a))
    if a.ndim == 2:
        return MatrixFunction.constant(a)
    raise PHStructuralError("cannot coerce array of shape %s to MatrixFunction" % (a.shape,))


def _encode_array(a):
    """Nested lists; complex entries as [re, im] pairs."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        def enc(x):
            if isinstance(x, (list, np.ndarray)):
                return [enc(v) for v in x]
            return [float(np.real(x)), float(np.imag(x))]
        return [enc(row) for row in a.tolist()] if a.ndim > 0 else enc(a.item())
    return a.tolist()


def _decode_array(data, depth):
    """Inverse of _encode_array given the expected nesting depth."""
    def level(x):
        if not isinstance(x, list):
            return 0
        return 1 + (level(x[0]) if x else 0)
    lv = level(data)
    if lv == depth:
        return np.asarray(data, dtype=float)
    if lv == depth + 1:
        def dec(x, d):
            if d == 0:
                return complex(x[0], x[1])
            return [dec(v, d - 1) for v in x]
        return np.asarray(dec(data, depth), dtype=complex)
    raise PHStructuralError("array nesting depth %d does not match expected %d" % (lv, depth))


@dataclass(frozen=True)
class PHSubsystem:
    """One port-Hamiltonian subsystem, rescaled to (0, 1) on construction."""

    order: int
    dim: int
    p_matrices: tuple          # (P_0 | None | MatrixFunction, P_1, ..., P_N)
    hamiltonian: MatrixFunction
    w_b: np.ndarray
    w_c: np.ndarray
    interval: tuple = (0.0, 1.0)
    label: str = ""

    def __post_init__(self):
        a, b = self.interval
        if not b > a:
            raise PHStructuralError("interval (a, b) must satisfy a < b")
        scale = b - a
        ps = list(self.p_matrices)
        if len(ps) != self.order + 1:
            raise PHStructuralError("need %d coefficient matrices P_0..P_N, got %d"
                                    % (self.order + 1, len(ps)))
        p0 = ps[0]
        if p0 is not None and not isinstance(p0, MatrixFunction):
            p0 = as_matrix_function(p0, self.dim)
        coerced = [p0]
        for k in range(1, self.order + 1):
            if ps[k] is None:
                raise PHStructuralError("P_%d must be a matrix (use zeros); "
                                        "only P_0 may be None" % k)
            pk = _as_matrix(ps[k], dtype=complex if np.iscomplexobj(np.asarray(ps[k])) else float)
            coerced.append(pk * scale ** (-k) if scale != 1.0 else pk)
        object.__setattr__(self, "p_matrices", tuple(coerced))
        object.__setattr__(self, "w_b", _as_matrix(self.w_b))
        object.__setattr__(self, "w_c", _as_matrix(self.w_c))
        ham = self.hamiltonian
        if not isinstance(ham, MatrixFunction):
            ham = as_matrix_function(ham, self.dim)
        object.__setattr__(self, "hamiltonian", ham)

    @property
    def port_dim(self):
        """Nd, the number of boundary input (and output) components."""
        return self.order * self.dim

    @property
    def trace_dim(self):
        """2Nd, the length of the boundary trace vector."""
        return 2 * self.order * self.dim

    @property
    def p0(self):
        return self.p_matrices[0]

    def structural_check(self):
        """Raise PHStructuralError on any (N, d) versus matrix-shape mismatch."""
        n, d = self.order, self.dim
        if n < 1 or d < 1:
            raise PHStructuralError("order and dim must be positive")
        for k in range(1, n + 1):
            if self.p_matrices[k].shape != (d, d):
                raise PHStructuralError("P_%d has shape %s, expected (%d, %d)"
                                        % (k, self.p_matrices[k].shape, d, d))
        if self.p0 is not None and self.p0.dim != d:
            raise PHStructuralError("P_0 has dimension %d, expected %d" % (self.p0.dim, d))
        if self.hamiltonian.dim != d:
            raise PHStructuralError("H has dimension %d, expected %d"
                                    % (self.hamiltonian.dim, d))
        nd, tnd = n * d, 2 * n * d
        if self.w_b.shape != (nd, tnd):
            raise PHStructuralError("W_B has shape %s, expected (%d, %d)"
                                    % (self.w_b.shape, nd, tnd))
        if self.w_c.shape != (nd, tnd):
            raise PHStructuralError("W_C has shape %s, expected (%d, %d)"
                                    % (self.w_c.shape, nd, tnd))


@dataclass(frozen=True)
class FluxForm:
    """Hermitian Q with Re<Ax, x>_X = 1/2 tau(Hx)* Q tau(Hx) + P_0 volume term."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q)
        q = 0.5 * (q + q.conj().T)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)


@dataclass
class ValidationReport:
    """Result of validate_subsystem: one (name, passed, margin, detail) per invariant."""

    checks: list = field(default_factory=list)

    def add(self, name, passed, margin, detail=""):
        self.checks.append({"name": name, "passed": bool(passed),
                            "margin": float(margin), "detail": detail})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def to_dict(self):
        return {"passed": self.passed, "checks": self.checks}


# relative tolerance policy for all PSD / invertibility style checks
REL_TOL = 1e-10


def validate_subsystem(subsystem, grid_points=None):
    """Check every structural invariant of a PHSubsystem.

    Returns a ValidationReport listing, per invariant, pass/fail and the
    measured margin.  Raises PHStructuralError on shape mismatches, which
    are not invariant failures.
    """
    s = subsystem
    s.structural_check()
    rep = ValidationReport()

    # symmetry relations P_k^* = (-1)^{k+1} P_k
    for k in range(1, s.order + 1):
        pk = s.p_matrices[k]
        want = (-1.0) ** (k + 1)
        scale = max(np.abs(pk).max(), 1e-300)
        defect = np.abs(pk.conj().T - want * pk).max() / scale
        rep.add("P_%d symmetry" % k, defect <= 1e-12, defect,
                "relative defect of P_k^* = (-1)^(k+1) P_k")

    # P_N invertible
    sv = np.linalg.svd(s.p_matrices[s.order], compute_uv=False)
    ratio = sv.min() / max(sv.max(), 1e-300)
    rep.add("P_N invertible", ratio > 1e-10, ratio, "sigma_min / sigma_max of P_N")

    # [W_B; W_C] invertible
    stacked = np.vstack([s.w_b, s.w_c])
    sv = np.linalg.svd(stacked, compute_uv=False)
    ratio = sv.min() / max(sv.max(), 1e-300)
    rep.add("[W_B; W_C] invertible", ratio > REL_TOL * 1.0, ratio,
            "sigma_min / sigma_max of the stacked boundary matrix")

    # H Hermitian and coercive on the sample grid
    zs = np.linspace(0.0, 1.0, 257)
    if s.hamiltonian.kind == "samples":
        n_s = s.hamiltonian.data.shape[0]
        zs = np.union1d(zs, np.linspace(0.0, 1.0, n_s))
    if grid_points is not None:
        zs = np.union1d(zs, np.asarray(grid_points))
    herm = s.hamiltonian.hermitian_defect(zs)
    rep.add("H Hermitian", herm <= 1e-12 * max(1.0, float(np.abs(s.hamiltonian(zs)).max())),
            herm, "max entrywise Hermitian defect over sample grid")
    m_coer = s.hamiltonian.min_eig(zs)
    rep.add("H coercive", m_coer > 1e-8, m_coer, "min eigenvalue of H over sample grid")

    # Lipschitz surrogate, recorded only (no pass/fail threshold)
    slope = s.hamiltonian.lipschitz_slope()
    rep.add("H Lipschitz slope (recorded)", True, slope,
            "finite-difference slope bound between adjacent samples")
    return rep


def trace(y_samples, order, diff=None):
    """Boundary trace tau(y) of a grid function.

    Parameters
    ----------
    y_samples : (n,) or (n, d) array of point values on a collocation grid
        whose differentiation matrix is `diff`.
    order : the differential order N; derivatives up to N-1 are extracted.
    diff : (n, n) differentiation matrix; required when order > 1.

    Returns the 2Nd vector ordered
    (y(1), y'(1), ..., y^(N-1)(1), y(0), ..., y^(N-1)(0)).
    """
    y = np.asarray(y_samples)
    if y.ndim == 1:
        y = y[:, None]
    n, d = y.shape
    if order > 1 and diff is None:
        raise PHStructuralError("trace of order %d needs a differentiation matrix" % order)
    at_one, at_zero = [], []
    cur = y
    for k in range(order):
        at_one.append(cur[-1])
        at_zero.append(cur[0])
        if k + 1 < order:
            cur = diff @ cur
    return np.concatenate(at_one + at_zero)


def flux_matrix(p_matrices, order, dim):
    """Hermitian 2Nd x 2Nd matrix of the boundary flux quadratic form.

    Built by accumulating the integration-by-parts identity

        Re int y* P_k y^(k) dz
          = 1/2 sum_{j=0}^{k-1} (-1)^j [ (y^(j))* P_k y^(k-1-j) ]_0^1

    over k = 1..N, which holds for every polynomial y because of the
    symmetry relations P_k^* = (-1)^{k+1} P_k.
    """
    n, d = order, dim
    is_complex = any(np.iscomplexobj(p_matrices[k]) for k in range(1, n + 1))
    q = np.zeros((2 * n * d, 2 * n * d), dtype=complex if is_complex else float)

    def add(row, col, mat):
        q[row * d:(row + 1) * d, col * d:(col + 1) * d] += mat / 2.0
        q[col * d:(col + 1) * d, row * d:(row + 1) * d] += mat.conj().T / 2.0

    for k in range(1, n + 1):
        pk = np.asarray(p_matrices[k])
        for j in range(k):
            sign = (-1.0) ** j
            add(j, k - 1 - j, sign * pk)             # endpoint z = 1
            add(n + j, n + (k - 1 - j), -sign * pk)  # endpoint z = 0
    return q


def flux_form(subsystem):
    """FluxForm of a validated subsystem (boundary part of Re<Ax, x>_X)."""
    s = subsystem
    s.structural_check()
    return FluxForm(flux_matrix(s.p_matrices, s.order, s.dim))
