"""Constructors for the worked example networks.

chain_of_strings          serially damped wave segments, K with the
                          -kappa0 / +-1 / -kappa_j pattern
euler_bernoulli_beam      one order-2 subsystem, dissipative left end K_0,
                          conservative right end from the catalog
damper_string_beam        wave + beam with conserving transmission and a
                          boundary damper
spring_mass_damper_string_beam
                          same plus the (m, k, r) tip controller
mass_damped_string        wave + tip mass-spring-damper, free far end: the
                          resolvent-growth demonstration (asymptotically
                          but not uniformly exponentially stable)

State identification for every wave segment: x = (rho w_t, w_zeta) with
H = diag(1/rho, T), so y = Hx = (w_t, T w_zeta) carries physical velocity
and force at the ports; the beam uses x = (rho w_t, w_zz) with
H = diag(1/rho, EI).  Damping signs are the energy-dissipative ones; set
literal_bc_sign on the chain for the opposite end-damper orientation
(T w_z)(0) = -kappa0 w_t(0), which pumps energy and fails certification.
"""

import numpy as np
from dataclasses import dataclass

from .model import MatrixFunction, PHSubsystem
from .network import Controller, Network


class ScenarioError(ValueError):
    """A scenario invariant was violated by the requested parameters."""


class ScalarProfile:
    """Scalar coefficient on [0, 1]: constant, polynomial, or sampled."""

    def __init__(self, kind, data):
        if kind not in ("constant", "polynomial", "samples"):
            raise ScenarioError("unknown profile kind %r" % (kind,))
        self.kind = kind
        self.data = np.atleast_1d(np.asarray(data, dtype=float))

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        if self.kind == "constant":
            return np.full_like(z, self.data[0])
        if self.kind == "polynomial":
            out = np.zeros_like(z)
            for c in self.data[::-1]:
                out = out * z + c
            return out
        n_s = len(self.data)
        t = np.clip(z, 0.0, 1.0) * (n_s - 1)
        i0 = np.minimum(t.astype(int), n_s - 2)
        w = t - i0
        return (1 - w) * self.data[i0] + w * self.data[i0 + 1]

    def min_value(self, n=513):
        return float(self(np.linspace(0, 1, n)).min())

    def to_dict(self):
        if self.kind == "constant":
            return float(self.data[0])
        return {"kind": self.kind, "data": self.data.tolist()}


def scalar_profile(value):
    if isinstance(value, ScalarProfile):
        return value
    if isinstance(value, dict):
        return ScalarProfile(value["kind"], value["data"])
    if np.isscalar(value):
        return ScalarProfile("constant", [float(value)])
    raise ScenarioError("cannot interpret %r as a coefficient profile" % (value,))


def _diag_hamiltonian(top, bottom, n_sample=513):
    """MatrixFunction for H = diag(top(z), bottom(z)); exact when constant."""
    if top.kind == "constant" and bottom.kind == "constant":
        return MatrixFunction.constant(np.diag([top.data[0], bottom.data[0]]))
    zs = np.linspace(0.0, 1.0, n_sample)
    tv, bv = top(zs), bottom(zs)
    vals = np.zeros((n_sample, 2, 2))
    vals[:, 0, 0] = tv
    vals[:, 1, 1] = bv
    return MatrixFunction.samples(vals)


P1_WAVE = np.array([[0.0, 1.0], [1.0, 0.0]])
P2_BEAM = np.array([[0.0, -1.0], [1.0, 0.0]])

# trace component indices for N=1, d=2: tau = (y1(1), y2(1), y1(0), y2(0))
_W1 = np.eye(4)

# trace component indices for N=2, d=2:
# tau = (y1(1), y2(1), y1'(1), y2'(1), y1(0), y2(0), y1'(0), y2'(0))
_W2 = np.eye(8)


def _wave_subsystem(rho, tension, length=1.0, kind="interior", label=""):
    """Impedance-passive wave segment on (0, 1) carrying physical ports.

    A physical segment of length l folds into the unit interval through
    H = diag(1/(l rho), T/l), which keeps both the physical energy and the
    physical port variables (w_t, T w_zeta), so joints couple without
    length factors.  kind selects the port splitting (all flux-conjugate,
    hence impedance passive with equality):
      interior      : B = (-y2(0), y1(1)),  C = (y1(0), y2(1))
      last          : B = (-y2(0), y2(1)),  C = (y1(0), y1(1))
      mass_interior : B = (-y1(0), y1(1)),  C = (y2(0), y2(1))
      mass_free     : B = (-y1(0), y2(1)),  C = (y2(0), y1(1))
    """
    rho, tension = scalar_profile(rho), scalar_profile(tension)
    if rho.min_value() <= 0 or tension.min_value() <= 0:
        raise ScenarioError("rho and T must be uniformly positive")
    scaled_rho = ScalarProfile(rho.kind, np.asarray(rho.data) * length)
    scaled_t = ScalarProfile(tension.kind, np.asarray(tension.data) / length)
    ham = _diag_hamiltonian(
        ScalarProfile("samples", 1.0 / scaled_rho(np.linspace(0, 1, 513)))
        if scaled_rho.kind != "constant" else
        ScalarProfile("constant", [1.0 / scaled_rho.data[0]]),
        scaled_t)
    rows = {"y1(1)": _W1[0], "y2(1)": _W1[1], "y1(0)": _W1[2], "y2(0)": _W1[3]}
    if kind == "interior":
        w_b = np.vstack([-rows["y2(0)"], rows["y1(1)"]])
        w_c = np.vstack([rows["y1(0)"], rows["y2(1)"]])
    elif kind == "last":
        w_b = np.vstack([-rows["y2(0)"], rows["y2(1)"]])
        w_c = np.vstack([rows["y1(0)"], rows["y1(1)"]])
    elif kind == "mass_interior":
        w_b = np.vstack([-rows["y1(0)"], rows["y1(1)"]])
        w_c = np.vstack([rows["y2(0)"], rows["y2(1)"]])
    elif kind == "mass_free":
        w_b = np.vstack([-rows["y1(0)"], rows["y2(1)"]])
        w_c = np.vstack([rows["y2(0)"], rows["y1(1)"]])
    else:
        raise ScenarioError("unknown wave port splitting %r" % (kind,))
    return PHSubsystem(order=1, dim=2, p_matrices=(None, P1_WAVE),
                       hamiltonian=ham, w_b=w_b, w_c=w_c, label=label)


# energy-space boundary rows at each beam end, per the conservative catalog
_BEAM_RIGHT_ROWS = {
    "pinned": (0, 1), "bc5": (0, 1),
    "free": (1, 3),
    "shear_hinge": (2, 3), "bc6": (2, 3),
    "clamped": (0, 2),
}
_BEAM_LEFT_ROWS = {
    "pinned": (4, 5), "bc5": (4, 5),
    "free": (5, 7),
    "shear_hinge": (6, 7), "bc6": (6, 7),
    "clamped": (4, 6),
}
# flux-conjugate partner of each trace component (sign, index)
_BEAM_PARTNER = {0: (-1.0, 3), 1: (1.0, 2), 2: (1.0, 1), 3: (-1.0, 0),
                 4: (1.0, 7), 5: (-1.0, 6), 6: (-1.0, 5), 7: (1.0, 4)}


def _partner_row(row):
    """Flux-conjugate completion of a constraint row (leading component rule)."""
    lead = int(np.argmax(np.abs(row)))
    sign, idx = _BEAM_PARTNER[lead]
    return sign * _W2[idx]


def _beam_subsystem(rho, ei, left_rows, right_rows, label=""):
    rho, ei = scalar_profile(rho), scalar_profile(ei)
    if rho.min_value() <= 0 or ei.min_value() <= 0:
        raise ScenarioError("rho and EI must be uniformly positive")
    inv_rho = (ScalarProfile("constant", [1.0 / rho.data[0]]) if rho.kind == "constant"
               else ScalarProfile("samples", 1.0 / rho(np.linspace(0, 1, 513))))
    ham = _diag_hamiltonian(inv_rho, ei)
    w_b = np.vstack(list(right_rows) + list(left_rows))
    w_c = np.vstack([_partner_row(r) for r in w_b])
    return PHSubsystem(order=2, dim=2, p_matrices=(None, np.zeros((2, 2)), P2_BEAM),
                       hamiltonian=ham, w_b=w_b, w_c=w_c, label=label)


def _dissipative_end_rows(k0):
    """Left-end rows of (y2(0), y2'(0)) = K0-coupled angular/linear velocity.

    Encodes ((EI w_zz)(0), -(EI w_zz)_z(0)) = +K0 (w_tz(0), w_t(0)), the
    energy-dissipating orientation: the boundary power is -v* Sym(K0) v
    with v = (w_tz(0), w_t(0)).
    """
    k0 = np.asarray(k0, dtype=float)
    row_a = _W2[5] - k0[0, 0] * _W2[6] - k0[0, 1] * _W2[4]
    row_b = _W2[7] + k0[1, 0] * _W2[6] + k0[1, 1] * _W2[4]
    return (row_a, row_b)


def _validate_k0(k0):
    k0 = np.asarray(k0, dtype=float)
    if k0.shape != (2, 2):
        raise ScenarioError("K0 must be 2 x 2")
    if np.abs(k0).max() == 0:
        return k0      # conservative free end
    sym = 0.5 * (k0 + k0.T)
    diag_class = (k0[0, 0] > 0 and k0[0, 1] == 0 and k0[1, 0] == 0 and k0[1, 1] == 0)
    pd_class = np.linalg.eigvalsh(sym).min() > 1e-12 * max(1.0, np.abs(k0).max())
    if not (diag_class or pd_class):
        raise ScenarioError(
            "K0 must be diag(k0_11, 0) with k0_11 > 0, have Sym K0 positive "
            "definite, or be zero (conservative)")
    return k0


@dataclass
class ChainOfStringsSpec:
    """Chain of m serially connected strings, damped at the left end.

    kappa = (kappa0, ..., kappa_{m-1}): kappa0 > 0 is the end damper,
    kappa_j >= 0 the joint dampers.  lengths are physical segment lengths
    (joints zeta^j = cumulative sums), folded into the unit-interval
    Hamiltonians.  literal_bc_sign flips the end damper to
    (T w_z)(0) = -kappa0 w_t(0), which pumps energy.
    """

    m: int = 3
    rho: list = None
    tension: list = None
    kappa: tuple = None
    lengths: list = None
    literal_bc_sign: bool = False

    def __post_init__(self):
        if self.m < 1:
            raise ScenarioError("need at least one segment")
        self.rho = [scalar_profile(r) for r in (self.rho or [1.0] * self.m)]
        self.tension = [scalar_profile(t) for t in (self.tension or [1.0] * self.m)]
        self.kappa = tuple(float(k) for k in (self.kappa if self.kappa is not None
                                              else [0.5] + [0.0] * (self.m - 1)))
        self.lengths = [float(v) for v in (self.lengths or [1.0] * self.m)]
        if not (len(self.rho) == len(self.tension) == len(self.lengths) == self.m):
            raise ScenarioError("need one rho, tension, length per segment")
        if len(self.kappa) != self.m:
            raise ScenarioError("need kappa0..kappa_{m-1} (%d values)" % self.m)
        if not self.kappa[0] > 0:
            raise ScenarioError("kappa0 > 0 is required (left-end damper)")
        if any(k < 0 for k in self.kappa[1:]):
            raise ScenarioError("joint dampers kappa_j must be >= 0")
        if any(l <= 0 for l in self.lengths):
            raise ScenarioError("segment lengths must be positive")


def chain_serial_blocks(spec):
    """The reformulated strictly lower-triangular block closure of the chain.

    Cluster 1 owns the damped-port row, clusters 2..m-1 the full left
    traces, cluster m additionally the free-end row; block (j+1, j) maps
    (y1(1), y2(1)) of segment j into segment j+1's left trace with the
    joint damper kappa_{j+1} on the force row.
    """
    m = spec.m
    kap = spec.kappa
    blocks = [[None] * m for _ in range(m)]
    if m == 1:
        return blocks
    for j in range(1, m):
        if j == 1:
            # C-hat of cluster 1 is (y1(0), y1(1), y2(1))
            blk = np.array([[0.0, 1.0, 0.0], [0.0, kap[1], 1.0]])
        else:
            blk = np.array([[1.0, 0.0], [kap[j], 1.0]])
        if j == m - 1:
            blk = np.vstack([blk, np.zeros((1, blk.shape[1]))])  # free-end row
        blocks[j][j - 1] = blk
    return blocks


def build_chain(spec=None, **kwargs):
    """Network for the chain of strings, serial_blocks attached."""
    if spec is None:
        spec = ChainOfStringsSpec(**kwargs)
    m = spec.m
    subsystems = []
    for j in range(m):
        kind = "interior" if j < m - 1 else "last"
        subsystems.append(_wave_subsystem(spec.rho[j], spec.tension[j],
                                          length=spec.lengths[j], kind=kind,
                                          label="string_%d" % (j + 1)))
    p = 2 * m
    k = np.zeros((p, p))
    k[0, 0] = spec.kappa[0] if spec.literal_bc_sign else -spec.kappa[0]
    for j in range(m - 1):
        # velocity continuity: B^j_2 = y1_j(1) equals C^{j+1}_1 = y1_{j+1}(0)
        k[2 * j + 1, 2 * (j + 1)] = 1.0
        # force balance: B^{j+1}_1 = -y2_{j+1}(0) = -y2_j(1) - kappa_{j+1} y1_{j+1}(0)
        k[2 * (j + 1), 2 * j + 1] = -1.0
        k[2 * (j + 1), 2 * (j + 1)] = -spec.kappa[j + 1]
    # free right end: row 2m-1 stays zero
    return Network(subsystems=subsystems, k_mat=k,
                   serial_blocks=chain_serial_blocks(spec),
                   label="chain_of_strings")


@dataclass
class EulerBernoulliSpec:
    """One Euler-Bernoulli beam with a dissipative or conservative left end.

    left_bc: a 2 x 2 matrix K0 (dissipative end; admissible classes
    diag(k > 0, 0), Sym K0 > 0, or zero = conservative free end) or one of
    the conservative enum names.  right_bc: pinned | free | shear_hinge |
    clamped | bc5 | bc6.
    """

    rho: object = 1.0
    ei: object = 1.0
    left_bc: object = None
    right_bc: str = "pinned"

    def __post_init__(self):
        self.rho = scalar_profile(self.rho)
        self.ei = scalar_profile(self.ei)
        if self.right_bc not in _BEAM_RIGHT_ROWS:
            raise ScenarioError("unknown right_bc %r (choose from %s)"
                                % (self.right_bc, sorted(_BEAM_RIGHT_ROWS)))
        if self.left_bc is None:
            self.left_bc = np.diag([1.0, 0.0])
        if isinstance(self.left_bc, str):
            if self.left_bc not in _BEAM_LEFT_ROWS:
                raise ScenarioError("unknown left_bc %r" % (self.left_bc,))
        else:
            self.left_bc = _validate_k0(self.left_bc)


def build_beam(spec=None, **kwargs):
    """Network with the single Euler-Bernoulli subsystem (K = 0 closure)."""
    if spec is None:
        spec = EulerBernoulliSpec(**kwargs)
    right = tuple(_W2[i] for i in _BEAM_RIGHT_ROWS[spec.right_bc])
    if isinstance(spec.left_bc, str):
        left = tuple(_W2[i] for i in _BEAM_LEFT_ROWS[spec.left_bc])
    else:
        left = _dissipative_end_rows(spec.left_bc)
    beam = _beam_subsystem(spec.rho, spec.ei, left, right, label="beam")
    return Network(subsystems=(beam,), k_mat=np.zeros((4, 4)),
                   label="euler_bernoulli_beam")


def _msd_controller(m, k, r):
    """Tip mass-spring-damper as an impedance-passive controller.

    State (w(0), w_t(0)) with energy weight diag(k, m); force input, the
    1/m in B_c makes the supply rate match <u, C_c x_c> exactly and gives
    Re<A x, x> = -r |x_c2|^2.
    """
    a_c = np.array([[0.0, 1.0], [-k / m, -r / m]])
    b_c = np.array([[0.0], [1.0 / m]])
    c_c = np.array([[0.0, 1.0]])
    d_c = np.zeros((1, 1))
    return Controller(a_c=a_c, b_c=b_c, c_c=c_c, d_c=d_c,
                      state_weight=np.diag([k, m]))


@dataclass
class CoupledSpec:
    """String-beam couplings of the two worked variants."""

    variant: str = "damper_string_beam"
    rho: object = 1.0
    tension: object = 1.0
    kappa: float = 1.0
    rho_beam: object = 1.0
    ei_beam: object = 1.0
    mass: float = 1.0
    stiffness: float = 1.0
    damping: float = 1.0

    def __post_init__(self):
        if self.variant not in ("damper_string_beam", "spring_mass_damper_string_beam"):
            raise ScenarioError("unknown coupled variant %r" % (self.variant,))
        for name in ("rho", "tension", "rho_beam", "ei_beam"):
            setattr(self, name, scalar_profile(getattr(self, name)))
        if self.variant == "damper_string_beam" and not self.kappa > 0:
            raise ScenarioError("the boundary damper needs kappa > 0")
        if self.variant == "spring_mass_damper_string_beam":
            if not (self.mass > 0 and self.stiffness > 0 and self.damping > 0):
                raise ScenarioError("spring-mass-damper needs m, k, r > 0 "
                                    "(r = 0 leaves the loop undamped)")


def build_coupled(spec=None, **kwargs):
    """String transmitting into a pinned beam, damped by boundary or tip MSD.

    Transmission rows (energy coordinates, conserving signs):
        y1_beam(0) = y1_string(1)      velocity continity at the joint
        y2_beam'(0) = -y2_string(1)    shear balances the string force
        y2_beam(0) = 0                 no moment at the joint
        (H x_beam)(1) = 0              pinned right end
    """
    if spec is None:
        spec = CoupledSpec(**kwargs)
    with_msd = spec.variant == "spring_mass_damper_string_beam"
    string = _wave_subsystem(spec.rho, spec.tension,
                             kind="mass_interior" if with_msd else "interior",
                             label="string")
    # beam left end: shear row y2'(0) (junction) and moment row y2(0) = 0
    beam = _beam_subsystem(spec.rho_beam, spec.ei_beam,
                           left_rows=(_W2[7], _W2[5]),
                           right_rows=(_W2[0], _W2[1]),
                           label="beam")
    # ports: string rows 0-1, beam rows 2-5; C columns likewise.
    # beam W_C rows: partners (y1'(1)... ) with C_3 = y1(0) at column 4.
    k = np.zeros((6, 6))
    k[1, 4] = 1.0       # string's right port equals the beam's left velocity
    k[4, 1] = -1.0      # beam shear row y2'(0) = -y2_string(1)
    controllers, coupling = (), ()
    if with_msd:
        controllers = (_msd_controller(spec.mass, spec.stiffness, spec.damping),)
        coupling = ((0,),)
    else:
        k[0, 0] = -spec.kappa   # -y2(0) = -kappa y1(0): dissipative damper
    return Network(subsystems=(string, beam), controllers=controllers,
                   k_mat=k, coupling=coupling, label=spec.variant)


@dataclass
class MassDampedStringSpec:
    """String with a tip mass-spring-damper, free right end.

    Every mode is damped (ASP holds) but the modal decay rates vanish like
    1/beta^2, so the resolvent peaks grow along the imaginary axis: the
    discrete surrogate of asymptotic-but-not-exponential stability.
    """

    rho: object = 1.0
    tension: object = 1.0
    mass: float = 1.0
    stiffness: float = 1.0
    damping: float = 1.0

    def __post_init__(self):
        self.rho = scalar_profile(self.rho)
        self.tension = scalar_profile(self.tension)
        if not (self.mass > 0 and self.stiffness > 0 and self.damping > 0):
            raise ScenarioError("mass, stiffness, damping must be positive")


def build_mass_damped_string(spec=None, **kwargs):
    if spec is None:
        spec = MassDampedStringSpec(**kwargs)
    string = _wave_subsystem(spec.rho, spec.tension, kind="mass_free", label="string")
    return Network(subsystems=(string,),
                   controllers=(_msd_controller(spec.mass, spec.stiffness,
                                                spec.damping),),
                   k_mat=np.zeros((2, 2)), coupling=((0,),),
                   label="mass_damped_string")


def make_initial_state(net, gen, preset="sine", seed=0):
    """Full sample-coordinate initial state from a named preset.

    Shapes the first state component of each subsystem with sine, a
    Gaussian bump, or a seeded random low-mode sum; all other components
    and controller states start at zero.
    """
    if preset.startswith("random"):
        if ":" in preset:
            seed = int(preset.split(":", 1)[1])
        rng = np.random.default_rng(seed)
        kind = "random"
    else:
        kind = preset
        rng = None
    x0 = np.zeros(gen.n_full)
    for j, (s, grid) in enumerate(zip(net.subsystems, gen.grids)):
        z = grid.points
        if kind == "sine":
            shape = np.sin(np.pi * z)
        elif kind == "bump":
            shape = np.exp(-((z - 0.5) / 0.12) ** 2)
        elif kind == "random":
            coeff = rng.standard_normal(6)
            shape = sum(c * np.sin((i + 1) * np.pi * z) for i, c in enumerate(coeff))
        else:
            raise ScenarioError("unknown initial-state preset %r" % (preset,))
        sl = gen.sample_slices[j]
        block = np.zeros((len(z), s.dim))
        block[:, 0] = shape
        x0[sl] = block.reshape(-1)
    return x0


SCENARIOS = {
    "chain_of_strings": {
        "build": lambda params: build_chain(ChainOfStringsSpec(**params)),
        "defaults": {"m": 3},   # kappa defaults to (0.5, 0, ..., 0) for any m
        "doc": "m wave segments, damped left end, free right end",
    },
    "euler_bernoulli_beam": {
        "build": lambda params: build_beam(EulerBernoulliSpec(**_decode_k0(params))),
        "defaults": {"left_bc": [[1.0, 0.0], [0.0, 0.0]], "right_bc": "clamped"},
        "doc": "single beam, dissipative left end K0, conservative right end",
    },
    "damper_string_beam": {
        "build": lambda params: build_coupled(CoupledSpec(variant="damper_string_beam",
                                                          **params)),
        "defaults": {"kappa": 1.0},
        "doc": "damped string transmitting into a pinned beam",
    },
    "spring_mass_damper_string_beam": {
        "build": lambda params: build_coupled(
            CoupledSpec(variant="spring_mass_damper_string_beam", **params)),
        "defaults": {"mass": 1.0, "stiffness": 1.0, "damping": 1.0},
        "doc": "string-beam with a tip mass-spring-damper controller",
    },
    "mass_damped_string": {
        "build": lambda params: build_mass_damped_string(MassDampedStringSpec(**params)),
        "defaults": {"mass": 1.0, "stiffness": 1.0, "damping": 1.0},
        "doc": "resolvent-growth demonstration: ASP holds, AIEP surrogate fails",
    },
}


def _decode_k0(params):
    params = dict(params)
    lb = params.get("left_bc")
    if isinstance(lb, list):
        params["left_bc"] = np.asarray(lb, dtype=float)
    return params


def build_scenario(name, params=None):
    if name not in SCENARIOS:
        raise ScenarioError("unknown scenario %r (choose from %s)"
                            % (name, sorted(SCENARIOS)))
    entry = SCENARIOS[name]
    merged = dict(entry["defaults"])
    merged.update(params or {})
    return entry["build"](merged)
