"""Closed-loop networks of port-Hamiltonian subsystems and linear controllers.

The network couples the stacked boundary maps through

    B x = K C x - sum_c S_c (C_c x_c + D_c S_c^T C x),
    d/dt x_c = A_c x_c + B_c S_c^T C x,

where K is the global interconnection matrix on stacked outputs and S_c
embeds controller c's ports into the stacked port space.  Assembly
produces constraint rows on (tau, x_c); dissipativity of the closed loop
is certified by restricting the aggregate flux + controller supply form
to the constraint null space.  Dissipative <=> contraction semigroup, by
the generation theorems the certificates realize.
"""

import numpy as np
import scipy.linalg as sla
from dataclasses import dataclass, field

from .model import PHStructuralError, _as_matrix, flux_form
from .passivity import _psd_verdict, _tol_for, check_sym_p0, null_basis


@dataclass(frozen=True)
class Controller:
    """Finite-dimensional linear control system with weighted state space.

    The state inner product is <x, y> = y* W x with W = state_weight
    Hermitian positive definite; impedance passivity of the controller is
    the LMI  [[Sym(W A_c), (W B_c - C_c*)/2], [., -Sym(D_c)]] <= 0.
    """

    a_c: np.ndarray
    b_c: np.ndarray
    c_c: np.ndarray
    d_c: np.ndarray
    state_weight: np.ndarray

    def __post_init__(self):
        for name in ("a_c", "b_c", "c_c", "d_c", "state_weight"):
            object.__setattr__(self, name, _as_matrix(getattr(self, name)))
        n, m = self.n_state, self.n_port
        if self.a_c.shape != (n, n):
            raise PHStructuralError("A_c must be square")
        if self.b_c.shape != (n, m) or self.c_c.shape != (m, n) or self.d_c.shape != (m, m):
            raise PHStructuralError("controller matrix shapes inconsistent: "
                                    "A_c %s B_c %s C_c %s D_c %s"
                                    % (self.a_c.shape, self.b_c.shape,
                                       self.c_c.shape, self.d_c.shape))
        w = self.state_weight
        if w.shape != (n, n):
            raise PHStructuralError("state_weight must be %d x %d" % (n, n))
        if np.abs(w - w.conj().T).max() > 1e-12 * max(1.0, np.abs(w).max()):
            raise PHStructuralError("state_weight must be Hermitian")
        if np.linalg.eigvalsh(0.5 * (w + w.conj().T)).min() <= 0:
            raise PHStructuralError("state_weight must be positive definite")

    @property
    def n_state(self):
        return self.a_c.shape[0]

    @property
    def n_port(self):
        return self.b_c.shape[1]

    def supply_defect(self):
        """Hermitian LMI block matrix on (x_c, u_c); <= 0 iff impedance passive."""
        w = self.state_weight
        s11 = 0.5 * (w @ self.a_c + self.a_c.conj().T @ w)
        s12 = 0.5 * (w @ self.b_c - self.c_c.conj().T)
        s22 = -0.5 * (self.d_c + self.d_c.conj().T)
        top = np.hstack([s11, s12])
        bot = np.hstack([s12.conj().T, s22])
        return np.vstack([top, bot])

    def input_projection(self):
        """Orthogonal projector onto range(D_c*), the strictly passive input directions."""
        d = self.d_c
        u, sv, vh = np.linalg.svd(d.conj().T)
        rank = int(np.sum(sv > 1e-10 * (sv[0] if len(sv) and sv[0] > 0 else 1.0)))
        basis = u[:, :rank]
        return basis @ basis.conj().T


@dataclass(frozen=True)
class Network:
    """Subsystems + controllers + interconnection.

    coupling[c] lists the global port rows controller c attaches to (each
    row mapped at most once across controllers).  k_mat acts on stacked
    outputs C x; rows listed in external_ports are left unconstrained
    (external inputs u-hat, recorded but not driven).  serial_blocks may
    carry a user-declared block reformulation for serial detection.
    """

    subsystems: tuple
    controllers: tuple = ()
    k_mat: np.ndarray = None
    coupling: tuple = ()
    external_ports: tuple = ()
    serial_blocks: object = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        object.__setattr__(self, "controllers", tuple(self.controllers))
        object.__setattr__(self, "coupling", tuple(tuple(c) for c in self.coupling))
        object.__setattr__(self, "external_ports", tuple(self.external_ports))
        if self.k_mat is not None:
            object.__setattr__(self, "k_mat", _as_matrix(self.k_mat))

    @property
    def port_dims(self):
        return [s.port_dim for s in self.subsystems]

    @property
    def total_ports(self):
        return sum(self.port_dims)

    @property
    def port_offsets(self):
        offs = np.concatenate([[0], np.cumsum(self.port_dims)])
        return offs[:-1]

    @property
    def trace_dims(self):
        return [s.trace_dim for s in self.subsystems]

    @property
    def trace_offsets(self):
        offs = np.concatenate([[0], np.cumsum(self.trace_dims)])
        return offs[:-1]

    @property
    def n_controller_states(self):
        return sum(c.n_state for c in self.controllers)


@dataclass
class ClosedLoopDescription:
    """Assembled constraint rows and energy forms of the closed loop.

    Constraint rows: w_b_net @ tau + c_c_net @ x_c = 0 (external rows
    already dropped).  q_blk is the block-diagonal flux form on stacked
    traces; sym_wa / cross carry the controller supply-rate form so that

        Re<A x-hat, x-hat> = 1/2 tau* q_blk tau + P_0 terms
                             + x_c* sym_wa x_c + Re(x_c* cross tau).
    """

    w_b_blk: np.ndarray
    w_c_blk: np.ndarray
    w_b_net: np.ndarray
    c_c_net: np.ndarray
    q_blk: np.ndarray
    sym_wa: np.ndarray
    cross: np.ndarray
    controller_weight: np.ndarray
    n_constraints: int
    kept_rows: np.ndarray
    trace_slices: list
    state_slices: list
    subsystem_hamiltonians: list = field(default_factory=list)

    def constraint_matrix(self):
        """Rows over the stacked (tau, x_c) vector."""
        return np.hstack([self.w_b_net, self.c_c_net])

    def energy_form(self):
        """Hermitian form F on (tau, x_c) with Re<Ax, x> = [.]* F [.] + P_0 terms."""
        top = np.hstack([0.5 * self.q_blk, 0.5 * self.cross.conj().T])
        bot = np.hstack([0.5 * self.cross, self.sym_wa])
        return np.vstack([top, bot])

    def to_dict(self):
        from .model import _encode_array
        return {"w_b_net": _encode_array(self.w_b_net),
                "c_c_net": _encode_array(self.c_c_net),
                "q_blk": _encode_array(self.q_blk),
                "n_constraints": self.n_constraints}


def _embed(rows_idx, n_ports):
    s = np.zeros((n_ports, len(rows_idx)))
    for j, r in enumerate(rows_idx):
        s[r, j] = 1.0
    return s


def assemble(net):
    """Build the ClosedLoopDescription of a Network.

    Raises PHStructuralError on port-dimension mismatches or a controller
    attached to a nonexistent / doubly-used port row.
    """
    for s in net.subsystems:
        s.structural_check()
    p = net.total_ports
    if len(net.coupling) != len(net.controllers):
        raise PHStructuralError("need one coupling entry per controller (%d controllers, "
                                "%d coupling entries)" % (len(net.controllers), len(net.coupling)))
    k = net.k_mat if net.k_mat is not None else np.zeros((p, p))
    if k.shape != (p, p):
        raise PHStructuralError("k_mat has shape %s, expected (%d, %d)" % (k.shape, p, p))

    w_b_blk = sla.block_diag(*[s.w_b for s in net.subsystems])
    w_c_blk = sla.block_diag(*[s.w_c for s in net.subsystems])
    q_blk = sla.block_diag(*[flux_form(s).q for s in net.subsystems])

    is_complex = any(np.iscomplexobj(m) for m in (w_b_blk, w_c_blk, k)) or any(
        np.iscomplexobj(m) for c in net.controllers
        for m in (c.a_c, c.b_c, c.c_c, c.d_c, c.state_weight))
    dtype = complex if is_complex else float
    w_b_net = (w_b_blk - k @ w_c_blk).astype(dtype)
    n_c = net.n_controller_states
    c_c_net = np.zeros((p, n_c), dtype=dtype)
    sym_wa = np.zeros((n_c, n_c), dtype=dtype)
    cross = np.zeros((n_c, w_c_blk.shape[1]), dtype=dtype)
    weights = []

    used = set()
    col = 0
    state_slices = []
    for c, ports in zip(net.controllers, net.coupling):
        if len(ports) != c.n_port:
            raise PHStructuralError("controller with %d ports attached to %d rows"
                                    % (c.n_port, len(ports)))
        for r in ports:
            if not (0 <= r < p):
                raise PHStructuralError("controller attached to nonexistent port row %d" % r)
            if r in used:
                raise PHStructuralError("port row %d mapped by more than one controller" % r)
            used.add(r)
        s_c = _embed(ports, p)
        sl = slice(col, col + c.n_state)
        state_slices.append(sl)
        w = c.state_weight
        # closure B x = K C x - S_c (C_c x_c + D_c S_c^T C x)
        w_b_net = w_b_net + s_c @ c.d_c @ s_c.T @ w_c_blk
        c_c_net[:, sl] = s_c @ c.c_c
        sym_wa[sl, sl] = 0.5 * (w @ c.a_c + c.a_c.conj().T @ w)
        cross[sl, :] = w @ c.b_c @ s_c.T @ w_c_blk
        weights.append(w)
        col += c.n_state

    kept = np.array([r for r in range(p) if r not in set(net.external_ports)], dtype=int)
    w_b_net = w_b_net[kept]
    c_c_net = c_c_net[kept]

    offs = net.trace_offsets
    trace_slices = [slice(int(o), int(o + ddim)) for o, ddim in zip(offs, net.trace_dims)]
    return ClosedLoopDescription(
        w_b_blk=w_b_blk, w_c_blk=w_c_blk, w_b_net=w_b_net, c_c_net=c_c_net,
        q_blk=q_blk, sym_wa=sym_wa, cross=cross,
        controller_weight=sla.block_diag(*weights) if weights else np.zeros((0, 0)),
        n_constraints=w_b_net.shape[0], kept_rows=kept,
        trace_slices=trace_slices, state_slices=state_slices,
        subsystem_hamiltonians=[s.hamiltonian for s in net.subsystems])


def check_controller_passive(controller, tol=None):
    """Impedance passivity certificate for a Controller.

    Tests the Hermitian supply-defect block matrix on (x_c, u_c); the
    certificate detail also reports strict input passivity: the largest
    kappa with defect <= -kappa * diag(0, Pi), Pi the orthogonal projector
    onto range(D_c*), and whether ker D_c is contained in ker B_c (the
    structural condition a strictly input passive loop needs).
    """
    defect = controller.supply_defect()
    if tol is None:
        tol = _tol_for(defect)
    cert = _psd_verdict(-defect, "controller", tol,
                        detail="-(supply defect) on (x_c, u_c)")
    pi = controller.input_projection()
    pi_hat = np.zeros_like(defect)
    n = controller.n_state
    pi_hat[n:, n:] = pi
    kappa = 0.0
    if cert.passed and np.abs(pi).max() > 0:
        lo, hi = 0.0, float(np.abs(defect).max() + 1.0)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            ok = np.linalg.eigvalsh(0.5 * ((defect + mid * pi_hat)
                                           + (defect + mid * pi_hat).conj().T)).max() <= tol
            lo, hi = (mid, hi) if ok else (lo, mid)
        kappa = lo
    # ker D_c subset of ker B_c <=> B_c (I - Pi_row) = 0 with Pi_row the
    # projector onto range(D_c*) = (ker D_c)^perp
    kernel_ok = bool(np.abs(controller.b_c @ (np.eye(controller.n_port) - pi)).max()
                     <= 1e-10 * max(1.0, np.abs(controller.b_c).max()))
    cert.detail += ("; strict input passivity margin kappa = %.3e; "
                    "ker D_c subset ker B_c: %s" % (kappa, kernel_ok))
    return cert


def constraint_projector(net):
    """Orthogonal projector onto the constraint null space on (tau, x_c)."""
    closed = assemble(net)
    z = null_basis(closed.constraint_matrix())
    return z @ z.conj().T


def certify_network_dissipative(net):
    """Generation certificate for the closed-loop network operator.

    Pass iff the aggregate flux + controller supply form restricted to the
    constraint null space is negative semi-definite and every spatially
    varying P_0 has pointwise Sym P_0 <= 0.  Pass implies the closed loop
    generates a contraction semigroup.  Networks with external_ports leave
    those rows unconstrained, so an open port that can carry power in makes
    the certificate fail (the open-loop system is only passive, not
    dissipative).
    """
    closed = assemble(net)
    for j, s in enumerate(net.subsystems):
        cert0 = check_sym_p0(s)
        if not cert0.passed:
            cert0.kind = "network"
            cert0.detail = "subsystem %d: Sym P_0 not negative semi-definite" % j
            return cert0
    form = closed.energy_form()
    z = null_basis(closed.constraint_matrix())
    restricted = z.conj().T @ form @ z
    cert = _psd_verdict(-restricted, "network", _tol_for(form),
                        detail="-(flux + controller supply) on the constraint null space")
    if cert.witness is not None:
        cert.witness = z @ cert.witness
    return cert


@dataclass(frozen=True)
class SerialStructure:
    """Block ordering under which the interconnection is strictly lower triangular."""

    ordering: tuple
    k_blocks: tuple

    def permuted_blocks(self):
        m = len(self.ordering)
        return [[self.k_blocks[self.ordering[i]][self.ordering[j]] for j in range(m)]
                for i in range(m)]


@dataclass(frozen=True)
class NotSerial:
    """Witness that no serial ordering exists: a dependency cycle of block indices."""

    cycle: tuple


def _block_nonzero(blk, tol):
    return blk is not None and np.asarray(blk).size > 0 and np.abs(blk).max() > tol


def detect_serial_structure_blocks(blocks, tol=None):
    """Serial detection on an m x m nested list of (possibly rectangular) blocks.

    blocks[j][i] maps cluster i's outputs into cluster j's input rows.
    Returns SerialStructure with an ordering under which the permuted block
    matrix is strictly lower triangular, or NotSerial with a cycle witness.
    Ties in the topological order break by ascending block index.
    """
    m = len(blocks)
    if tol is None:
        mx = max([np.abs(b).max() for row in blocks for b in row
                  if b is not None and np.asarray(b).size], default=0.0)
        tol = 1e-12 * max(1.0, mx)
    for i in range(m):
        if _block_nonzero(blocks[i][i], tol):
            return NotSerial(cycle=(i,))
    # edge i -> j iff block (j, i) nonzero: j depends on i's output
    succ = [[] for _ in range(m)]
    indeg = [0] * m
    for j in range(m):
        for i in range(m):
            if i != j and _block_nonzero(blocks[j][i], tol):
                succ[i].append(j)
                indeg[j] += 1
    ready = sorted(i for i in range(m) if indeg[i] == 0)
    order = []
    while ready:
        i = ready.pop(0)
        order.append(i)
        changed = False
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
                changed = True
        if changed:
            ready.sort()
    if len(order) < m:
        remaining = [i for i in range(m) if i not in order]
        cycle = _find_cycle(succ, remaining)
        return NotSerial(cycle=tuple(cycle))
    blocks_t = tuple(tuple(row) for row in blocks)
    structure = SerialStructure(ordering=tuple(order), k_blocks=blocks_t)
    # verify strict lower-block triangularity exactly
    perm = structure.permuted_blocks()
    for i in range(m):
        for j in range(i, m):
            if _block_nonzero(perm[i][j], tol):
                return NotSerial(cycle=(structure.ordering[i], structure.ordering[j]))
    return structure


def _find_cycle(succ, candidates):
    cand = set(candidates)
    for start in sorted(cand):
        stack, path, on_path = [(start, iter(succ[start]))], [start], {start}
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if nxt not in cand:
                    continue
                if nxt in on_path:
                    return path[path.index(nxt):]
                stack.append((nxt, iter(succ[nxt])))
                path.append(nxt)
                on_path.add(nxt)
                break
            else:
                stack.pop()
                on_path.discard(path.pop())
    return sorted(cand)[:1]


def detect_serial_structure(net, tol=None):
    """Serial detection for a Network.

    Uses the network's user-declared serial_blocks reformulation when
    present; otherwise partitions k_mat into per-subsystem port blocks.
    """
    if net.serial_blocks is not None:
        return detect_serial_structure_blocks(net.serial_blocks, tol=tol)
    p = net.total_ports
    k = net.k_mat if net.k_mat is not None else np.zeros((p, p))
    offs = list(net.port_offsets) + [p]
    m = len(net.subsystems)
    blocks = [[k[offs[j]:offs[j + 1], offs[i]:offs[i + 1]] for i in range(m)]
              for j in range(m)]
    return detect_serial_structure_blocks(blocks, tol=tol)
