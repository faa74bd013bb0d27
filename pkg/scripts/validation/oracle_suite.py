"""
Oracle validation suite: every numerical engine checked against an independent one.

Each check draws randomized cases from a seeded generator, measures the worst
deviation from its oracle and compares it with a tolerance (scaled by
tolerance_scale). Results come back as PASS/FAIL rows.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from physics.errors import TwinBeamError
from physics.fock_oracle import fock_oracle
from physics.moments import (
    InputState,
    Normalization,
    OperatorCombo,
    OutputFields,
    intensity_moments,
    output_operator_combos,
    squeeze_statistics,
    two_mode_analytic,
)
from physics.params_modes import uniform_grid
from physics.propagation import (
    SolverMethod,
    arrow_s,
    assemble_hmxw,
    transfer_analytic,
    transfer_matrix,
    transfer_ode_oracle,
)
from physics.susceptibility import CouplingCoefficients
from physics.wigner import (
    GaussianWigner,
    min_symplectic_eigenvalue,
    wigner_slice_2d,
    wigner_slice_integral_analytic,
)
from scripts.pipelines.squeeze_pipeline import TwinBeamPipeline
from utils.config import SimulationConfig, load_config

FAULT_SIZE = 1.0e-3
# 3-mode Fock tensors grow as dim^3
THREE_MODE_TRUNCATION = 24

CHECK_COLUMNS = ["check", "status", "error", "tolerance", "cases", "detail"]


@dataclass
class OracleCheck:
    check: str
    status: str
    error: float
    tolerance: float
    cases: int
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def as_row(self) -> Dict[str, object]:
        return {c: getattr(self, c) for c in CHECK_COLUMNS}


def relative_error(value: np.ndarray, reference: np.ndarray) -> float:
    """max |value - reference| / max(max |reference|, 1)."""
    value = np.asarray(value)
    reference = np.asarray(reference)
    scale = max(float(np.max(np.abs(reference))), 1.0)
    return float(np.max(np.abs(value - reference))) / scale


def random_couplings(
    rng: np.random.Generator, n_channels: int, z: float, bound: float, matched: bool = False
) -> CouplingCoefficients:
    """|kappa z| <= bound per entry, random phases; matched gives kappa_c = kappa_pr."""

    def draw() -> np.ndarray:
        magnitude = rng.uniform(0.05, 1.0, n_channels) * bound / z
        return magnitude * np.exp(2j * math.pi * rng.uniform(size=n_channels))

    kappa_pr = draw()
    kappa_c = kappa_pr.copy() if matched else draw()
    return CouplingCoefficients(kappa_pr=kappa_pr, kappa_c=kappa_c)


def random_combo(rng: np.random.Generator, n_modes: int, size: float = 0.5) -> OperatorCombo:
    def draw(shape=None):
        return size * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))

    return OperatorCombo(constant=0.2 * draw(), coeff_a=draw(n_modes), coeff_adag=draw(n_modes))


class OracleSuite:
    """
    Args:
        config: simulation config for the pipeline-level checks (defaults if None).
        tolerance_scale: multiplies every tolerance; values below 1 tighten the suite.
        inject_fault: perturb one transfer-matrix entry by 1e-3 in the semigroup check.
        seed: seed of the random case generator.
        solver_cases: randomized coupling sets for the solver agreement check.
        wick_cases: randomized operator combos for the Wick vs Fock check.
        truncation_dim: Fock levels per mode for up to two modes.
    """

    def __init__(
        self,
        config: Optional[SimulationConfig] = None,
        tolerance_scale: float = 1.0,
        inject_fault: bool = False,
        seed: int = 20240101,
        solver_cases: int = 200,
        wick_cases: int = 100,
        truncation_dim: int = 40,
    ):
        if not tolerance_scale > 0:
            raise ValueError(f"tolerance_scale must be positive, got {tolerance_scale}")
        self.config = config if config is not None else load_config()
        self.tolerance_scale = tolerance_scale
        self.inject_fault = inject_fault
        self.seed = seed
        self.solver_cases = solver_cases
        self.wick_cases = wick_cases
        self.truncation_dim = truncation_dim
        self.z = self.config.physical().cell_length_z
        self.results: List[OracleCheck] = []

    def checks(self) -> List[Tuple[str, Callable[[np.random.Generator], Tuple[float, float, int, str]]]]:
        return [
            ("solver_agreement", self.check_solver_agreement),
            ("semigroup", self.check_semigroup),
            ("arrow_cube_identity", self.check_arrow_cube),
            ("ode_convergence_order", self.check_ode_order),
            ("wick_vs_fock", self.check_wick_vs_fock),
            ("two_mode_closed_form", self.check_two_mode),
            ("shot_noise_identity", self.check_shot_noise),
            ("squeezing_sign", self.check_squeezing_sign),
            ("phase_covariance", self.check_phase_covariance),
            ("label_symmetry", self.check_label_symmetry),
            ("wigner_normalization", self.check_wigner_normalization),
            ("wigner_squeezed_covariance", self.check_wigner_covariance),
        ]

    # ----------------- propagation -----------------
    def check_solver_agreement(self, rng):
        worst = 0.0
        for _ in range(self.solver_cases):
            n = int(rng.integers(1, 9))
            H = assemble_hmxw(random_couplings(rng, n, self.z, 3.0))
            analytic = transfer_analytic(H, self.z).matrix
            eigen = transfer_matrix(H, self.z, SolverMethod.EIGEN).matrix
            ode = transfer_ode_oracle(H, self.z, self.config.solver.ode_steps).matrix
            worst = max(worst, relative_error(eigen, analytic), relative_error(ode, analytic))
        return worst, 1e-8, self.solver_cases, "eigen and ode vs analytic, N in 1..8, |kappa z| <= 3"

    def check_semigroup(self, rng):
        """T(z1 + z2) = T(z2) T(z1) on the configured physical couplings."""
        pipeline = TwinBeamPipeline(self.config)
        result = pipeline.propagate(pipeline.grid())
        H = assemble_hmxw(result.kappas)
        method = pipeline.method
        z1 = float(rng.uniform(0.2, 0.8)) * self.z
        z2 = self.z - z1

        total = transfer_matrix(H, self.z, method).matrix.copy()
        if self.inject_fault:
            scale = float(np.max(np.abs(total)))
            total[0, -1] += FAULT_SIZE * scale
            logger.warning(f"Injected a {FAULT_SIZE:g} relative fault into T[0, {total.shape[0] - 1}]")
        product = transfer_matrix(H, z2, method).matrix @ transfer_matrix(H, z1, method).matrix
        detail = f"{method.value} solver, {result.grid.n_channels} channels"
        return relative_error(product, total), 1e-10, 1, detail

    def check_arrow_cube(self, rng):
        worst = 0.0
        cases = 50
        for _ in range(cases):
            H = assemble_hmxw(random_couplings(rng, int(rng.integers(1, 9)), self.z, 3.0)).matrix
            worst = max(worst, relative_error(H @ H @ H, arrow_s(H) * H))
        return worst, 1e-12, cases, "H^3 = s H"

    def check_ode_order(self, rng):
        H = assemble_hmxw(random_couplings(rng, 3, self.z, 1.0))
        exact = transfer_analytic(H, self.z).matrix
        coarse = relative_error(transfer_ode_oracle(H, self.z, 40).matrix, exact)
        fine = relative_error(transfer_ode_oracle(H, self.z, 80).matrix, exact)
        order = math.log2(coarse / fine)
        return abs(order - 4.0), 0.2, 2, f"measured order {order:.3f}"

    # ----------------- moments -----------------
    def check_wick_vs_fock(self, rng):
        worst = 0.0
        for i in range(self.wick_cases):
            n_modes = 2 + i % 2
            dim = self.truncation_dim if n_modes <= 2 else min(self.truncation_dim, THREE_MODE_TRUNCATION)
            state = InputState(eta=1.2 * rng.uniform() * np.exp(2j * math.pi * rng.uniform()))
            probe = random_combo(rng, n_modes)
            conjugate = random_combo(rng, n_modes)
            wick = intensity_moments(probe, conjugate, state).as_array()
            fock = fock_oracle(probe, conjugate, state, dim).as_array()
            worst = max(worst, float(np.max(np.abs(wick - fock))))
        return worst, 1e-6, self.wick_cases, "absolute, all six intensity moments"

    def check_two_mode(self, rng):
        grid = uniform_grid(1)
        worst = 0.0
        cases = 100
        for _ in range(cases):
            kappas = random_couplings(rng, 1, self.z, 1.5)
            n_pr = float(10 ** rng.uniform(0, 4))
            state = InputState.from_photon_number(n_pr, rng.uniform(0, 2 * math.pi))
            T = transfer_analytic(assemble_hmxw(kappas), self.z)
            fields = output_operator_combos(T, grid, Normalization.PHOTON)
            var, snl, _ = squeeze_statistics(fields, state, 0)
            closed = two_mode_analytic(kappas.kappa_pr[0], kappas.kappa_c[0], self.z, n_pr)
            worst = max(
                worst,
                abs(var - closed.var) / abs(closed.var),
                abs(snl - closed.var_snl) / abs(closed.var_snl),
            )
        return worst, 1e-10, cases, "Wick engine vs closed form, relative"

    def check_shot_noise(self, rng):
        grid = uniform_grid(3)
        fields = output_operator_combos(np.eye(grid.n_modes), grid, Normalization.PHOTON)
        worst = 0.0
        cases = 0
        for n_pr in (1.0, 1e2, 1e4):
            state = InputState.from_photon_number(n_pr, rng.uniform(0, 2 * math.pi))
            for k in range(grid.n_channels):
                var, snl, snf = squeeze_statistics(fields, state, k)
                worst = max(worst, abs(snf), abs(var - n_pr) / n_pr, abs(snl - n_pr) / n_pr)
                cases += 1
        return worst, 1e-12, cases, "zero coupling gives var = var_snl = N"

    def check_squeezing_sign(self, rng):
        grid = uniform_grid(1)
        worst = 0.0
        cases = 0
        not_squeezed = []
        for zeta in (0.1, 0.5, 1.0, 2.0):
            kappa = zeta / self.z
            pair = CouplingCoefficients(kappa_pr=np.array([kappa]), kappa_c=np.array([kappa]))
            fields = output_operator_combos(transfer_analytic(assemble_hmxw(pair), self.z), grid)
            for n_pr in (1.0, 1e2, 1e4):
                var, _, snf = squeeze_statistics(fields, InputState.from_photon_number(n_pr), 0)
                worst = max(worst, abs(var - n_pr) / n_pr)
                if not snf < 0:
                    not_squeezed.append((zeta, n_pr))
                cases += 1
        if not_squeezed:
            return math.inf, 1e-10, cases, f"no squeezing at (zeta, N) = {not_squeezed}"
        return worst, 1e-10, cases, "g = 1: var = N and S_NF < 0"

    def check_phase_covariance(self, rng):
        grid = uniform_grid(3)
        worst = 0.0
        cases = 20
        for _ in range(cases):
            T = transfer_analytic(assemble_hmxw(random_couplings(rng, 3, self.z, 1.0, matched=True)), self.z)
            fields = output_operator_combos(T, grid)
            n_pr = float(10 ** rng.uniform(0, 4))
            base = squeeze_statistics(fields, InputState.from_photon_number(n_pr), 0)[2]
            shifted = squeeze_statistics(
                fields, InputState.from_photon_number(n_pr, rng.uniform(0, 2 * math.pi)), 0
            )[2]
            worst = max(worst, abs(shifted - base))
        return worst, 1e-10, cases, "S_NF independent of the probe phase"

    def check_label_symmetry(self, rng):
        grid = uniform_grid(2)
        worst = 0.0
        cases = 20
        for _ in range(cases):
            T = transfer_analytic(assemble_hmxw(random_couplings(rng, 2, self.z, 1.0)), self.z)
            fields = output_operator_combos(T, grid)
            state = InputState.from_photon_number(float(10 ** rng.uniform(0, 4)))
            forward = squeeze_statistics(fields, state, 1)
            swapped_fields = OutputFields(probe=fields.conjugate(1), conjugates=(fields.probe,))
            backward = squeeze_statistics(swapped_fields, state, 0)
            worst = max(worst, relative_error(np.array(backward[:2]), np.array(forward[:2])))
        return worst, 1e-12, cases, "swapping probe and conjugate leaves var and var_snl"

    # ----------------- Wigner -----------------
    def check_wigner_normalization(self, rng):
        worst = 0.0
        min_nu = math.inf
        cases = 5
        for _ in range(cases):
            pair = random_couplings(rng, 2, self.z, 0.8, matched=True)
            T = transfer_analytic(assemble_hmxw(pair), self.z)
            eta = complex(rng.normal(), rng.normal())
            gaussian = GaussianWigner(T, eta)
            fixed = gaussian.center.copy()
            free = [0, 2]
            width = np.sqrt(np.diag(np.linalg.inv(gaussian.precision[np.ix_(free, free)])))
            x0, y0 = fixed[free]
            slice_grid = wigner_slice_2d(
                T,
                eta,
                mode_pair=(0, 1),
                x_range=(x0 - 8 * width[0], x0 + 8 * width[0]),
                y_range=(y0 - 8 * width[1], y0 + 8 * width[1]),
                samples=(201, 201),
                fixed=fixed,
            )
            analytic = wigner_slice_integral_analytic(T, eta, (0, 1), fixed)
            worst = max(worst, abs(slice_grid.numeric_integral() - analytic) / analytic)
            min_nu = min(min_nu, min_symplectic_eigenvalue(gaussian.covariance("quadrature")))
        if min_nu < 0.5 - 1e-9:
            return math.inf, 1e-3, cases, f"unphysical covariance, min symplectic eigenvalue {min_nu:.6f}"
        return worst, 1e-3, cases, "trapezoid vs closed-form slice integral"

    def check_wigner_covariance(self, rng):
        worst = 0.0
        zetas = (0.25, 0.5, 1.0)
        u = np.zeros(4)
        u[0], u[2] = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
        for zeta in zetas:
            kappa = zeta / self.z
            pair = CouplingCoefficients(kappa_pr=np.array([kappa]), kappa_c=np.array([kappa]))
            T = transfer_analytic(assemble_hmxw(pair), self.z)
            cov = GaussianWigner(T, 0.0).covariance("quadrature")
            worst = max(worst, abs(u @ cov @ u - 0.5 * math.exp(-2.0 * zeta)))
        return worst, 1e-6, len(zetas), "Var(x_pr - x_c)/2 = exp(-2 zeta)/2"

    # ----------------- driver -----------------
    def run(self) -> List[OracleCheck]:
        rng = np.random.default_rng(self.seed)
        self.results = []
        for name, check in self.checks():
            try:
                error, tolerance, cases, detail = check(rng)
            except TwinBeamError as e:
                logger.error(f"{name}: {e}")
                self.results.append(OracleCheck(name, "FAIL", math.inf, math.nan, 0, str(e)))
                continue
            tolerance *= self.tolerance_scale
            status = "PASS" if error <= tolerance else "FAIL"
            log = logger.info if status == "PASS" else logger.error
            log(f"{name}: {status} (error {error:.3e}, tolerance {tolerance:.3e})")
            self.results.append(OracleCheck(name, status, error, tolerance, cases, detail))
        return self.results

    @property
    def all_passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    def failed(self) -> List[str]:
        return [r.check for r in self.results if not r.passed]

    def rows(self) -> List[Dict[str, object]]:
        return [r.as_row() for r in self.results]

    @staticmethod
    def summary(results: List[OracleCheck]) -> None:
        total = len(results)
        passed = sum(1 for r in results if r.passed)
        success_rate = passed / total * 100 if total > 0 else 0
        logger.success(f"Finished {total} oracle checks.")
        logger.success(f"Total of {passed} checks passed with a pass-rate of {success_rate:.2f}%")


if __name__ == "__main__":
    suite = OracleSuite()
    OracleSuite.summary(suite.run())
