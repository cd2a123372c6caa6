"""Five-level atom: Lindblad generator and zeroth-order steady state.

States are indexed 0..4 for |1>..|5>.  Two ground states |1>, |2>; excited
states |3>, |4> coupled to |2> by the control fields; |5> is the auxiliary
state addressed by the incoherent two-way pump on |1>.  The probe and signal
fields do not appear here: the steady state computed from this generator is
zeroth order in them by construction.

All rates are angular frequencies in rad/s.  Density matrices are stored as
5x5 complex arrays; the generator acts on the column-stacked (Fortran order)
density matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSteadyState

NLEV = 5

# Hermiticity / trace / residual tolerances used by the steady-state checks.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class LevelScheme:
    """Spontaneous decay rates of the excited states and ground dephasing.

    gamma_ik is the decay rate |i> -> |k|; gamma21 is a pure dephasing of
    the |2><1| ground-state coherence (it broadens rho_21 only, not the
    optical coherences).  Total widths Gamma3/4/5 are always derived.
    """

    gamma31: float
    gamma32: float
    gamma41: float
    gamma42: float
    gamma51: float
    gamma52: float
    gamma21: float = 0.0

    def __post_init__(self):
        for name in ("gamma31", "gamma32", "gamma41", "gamma42",
                     "gamma51", "gamma52", "gamma21"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def total3(self):
        return self.gamma31 + self.gamma32

    @property
    def total4(self):
        return self.gamma41 + self.gamma42

    @property
    def total5(self):
        return self.gamma51 + self.gamma52


@dataclass(frozen=True)
class DriveConfig:
    """Control-field Rabi frequencies/detunings and the incoherent pump rate.

    omega_c1 drives |2><->|3>, omega_c2 drives |2><->|4>; both may be complex.
    pump_p is the two-way incoherent pump rate on |1><->|5>.
    """

    omega_c1: complex
    omega_c2: complex
    delta_c1: float = 0.0
    delta_c2: float = 0.0
    pump_p: float = 0.0

    def __post_init__(self):
        if self.pump_p < 0:
            raise ValueError("pump_p must be >= 0")


@dataclass(frozen=True)
class DensityMatrix:
    """5x5 zeroth-order density matrix with physicality checks."""

    rho: np.ndarray

    def check(self):
        """Raise if Hermiticity, trace or positivity tolerances are violated."""
        r = self.rho
        if r.shape != (NLEV, NLEV):
            raise ValueError("density matrix must be 5x5")
        herm = np.max(np.abs(r - r.conj().T))
        if herm >= HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: deviation {herm:.3e}")
        tr = abs(np.trace(r) - 1.0)
        if tr >= TRACE_TOL:
            raise ValueError(f"trace deviates from 1 by {tr:.3e}")
        evals = np.linalg.eigvalsh((r + r.conj().T) / 2)
        if evals.min() < -POSITIVITY_TOL:
            raise ValueError(f"negative eigenvalue {evals.min():.3e}")
        return self

    @property
    def populations(self):
        return np.real(np.diag(self.rho))


@dataclass(frozen=True)
class Liouvillian:
    """25x25 generator acting on the column-stacked density matrix."""

    generator: np.ndarray

    def trace_defect(self):
        """Norm of the trace functional composed with the generator.

        Trace preservation means the row vector extracting tr(rho) from
        vec(rho) annihilates the generator's image.
        """
        tr_row = np.zeros(NLEV * NLEV)
        tr_row[:: NLEV + 1] = 1.0
        return np.linalg.norm(tr_row @ self.generator)


def _left(a):
    """Superoperator for rho -> a @ rho on column-stacked rho."""
    return np.kron(np.eye(NLEV), a)


def _right(a):
    """Superoperator for rho -> rho @ a on column-stacked rho."""
    return np.kron(a.T, np.eye(NLEV))


def _dissipator(c):
    """Lindblad dissipator D[c] as a superoperator."""
    cdc = c.conj().T @ c
    return (np.kron(c.conj(), c)
            - 0.5 * _left(cdc)
            - 0.5 * _right(cdc))


def build_liouvillian(scheme: LevelScheme, drive: DriveConfig) -> Liouvillian:
    """Assemble the generator: coherent couplings, decays, dephasing, pump.

    The rotating-frame Hamiltonian is
        H = -delta_c1 |3><3| - delta_c2 |4><4|
            - (omega_c1 |3><2| + omega_c2 |4><2| + h.c.)
    Decay |i> -> |k> enters as a Lindblad channel sqrt(gamma_ik) |k><i|;
    the incoherent two-way pump as two channels sqrt(p) |5><1| and
    sqrt(p) |1><5| (each at the full rate p, which yields p/2 damping on
    every coherence involving |1> or |5>).  gamma21 is added directly as
    -gamma21 on the rho_21 and rho_12 components so that it broadens the
    ground-state coherence only.
    """
    ham = np.zeros((NLEV, NLEV), dtype=complex)
    ham[2, 2] = -drive.delta_c1
    ham[3, 3] = -drive.delta_c2
    ham[2, 1] = -drive.omega_c1
    ham[3, 1] = -drive.omega_c2
    ham[1, 2] = -np.conj(drive.omega_c1)
    ham[1, 3] = -np.conj(drive.omega_c2)

    gen = -1j * (_left(ham) - _right(ham))

    decays = (
        (scheme.gamma31, 2, 0), (scheme.gamma32, 2, 1),
        (scheme.gamma41, 3, 0), (scheme.gamma42, 3, 1),
        (scheme.gamma51, 4, 0), (scheme.gamma52, 4, 1),
    )
    for rate, src, dst in decays:
        if rate > 0:
            c = np.zeros((NLEV, NLEV), dtype=complex)
            c[dst, src] = np.sqrt(rate)
            gen = gen + _dissipator(c)

    if drive.pump_p > 0:
        for src, dst in ((0, 4), (4, 0)):
            c = np.zeros((NLEV, NLEV), dtype=complex)
            c[dst, src] = np.sqrt(drive.pump_p)
            gen = gen + _dissipator(c)

    if scheme.gamma21 > 0:
        # rho_21 lives at flat index 1 + 5*0, rho_12 at 0 + 5*1.
        gen[1, 1] += -scheme.gamma21
        gen[NLEV, NLEV] += -scheme.gamma21

    return Liouvillian(generator=gen)


def steady_state(liouvillian: Liouvillian) -> DensityMatrix:
    """Solve L rho = 0 by SVD null-space extraction with trace normalization.

    The generator is rescaled by its largest entry before decomposition so
    the null-space detection and the residual check are dimensionless.
    Raises DegenerateSteadyState when the numerical null space is not
    one-dimensional.
    """
    gen = liouvillian.generator
    scale = np.max(np.abs(gen))
    if scale == 0:
        raise DegenerateSteadyState("zero generator")
    scaled = gen / scale

    _, svals, vh = np.linalg.svd(scaled)
    null_dim = int(np.sum(svals < 1e-9 * svals[0]))
    if null_dim != 1:
        raise DegenerateSteadyState(
            f"null space dimension {null_dim}, expected 1")

    vec = vh[-1].conj()
    rho = vec.reshape((NLEV, NLEV), order="F")
    trace = np.trace(rho)
    if abs(trace) < 1e-12:
        raise DegenerateSteadyState("null vector is traceless")
    rho = rho / trace
    rho = (rho + rho.conj().T) / 2

    residual = np.linalg.norm(scaled @ rho.flatten(order="F"))
    if residual >= RESIDUAL_TOL:
        raise DegenerateSteadyState(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL}")

    return DensityMatrix(rho=rho).check()
