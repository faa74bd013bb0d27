import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import optimize

from physics.dipole_model import (
    ChannelDipoles,
    DipoleModel,
    calibrate_dipole,
    channel_dipoles,
    peak_chi_c,
)
from physics.errors import CalibrationError, ConfigError, EmptyGridError
from physics.moments import (
    InputState,
    Normalization,
    SqueezeReport,
    mean_intensity,
    output_operator_combos,
    squeeze_statistics,
    to_db,
    two_mode_analytic,
)
from physics.params_modes import (
    DerivedQuantities,
    ModeGrid,
    PhysicalConfig,
    build_mode_grid,
    derive_quantities,
    restrict_grid,
    validate_config,
)
from physics.propagation import (
    SolverMethod,
    TransferMatrix,
    assemble_hmxw,
    symplectic_residual,
    transfer_analytic,
    transfer_matrix,
)
from physics.susceptibility import (
    CouplingCoefficients,
    SusceptibilityPair,
    kappa,
    susceptibilities,
    transition_frequency,
)
from physics.wigner import (
    GaussianWigner,
    WignerGrid,
    min_symplectic_eigenvalue,
    wigner_slice_2d,
    wigner_slice_integral_analytic,
)
from utils.config import SimulationConfig


@dataclass(frozen=True)
class PropagationResult:
    grid: ModeGrid
    dipoles: ChannelDipoles
    chis: SusceptibilityPair
    kappas: CouplingCoefficients
    transfer: TransferMatrix
    solver_delta: float
    z: float


@dataclass(frozen=True)
class CalibrationResult:
    target_snf_db: float
    peak_chi: float
    snf_db: float
    amplitude_scale: float
    model: DipoleModel


def two_mode_snf(result: PropagationResult, k: int, state: InputState) -> float:
    """Closed form when g is defined, otherwise the single-pair Wick evaluation."""
    kappa_pr = result.kappas.kappa_pr[k]
    kappa_c = result.kappas.kappa_c[k]
    z = result.z
    try:
        return two_mode_analytic(kappa_pr, kappa_c, z, state.photon_number).snf_log10
    except ZeroDivisionError:
        pair_grid = restrict_grid(result.grid, [result.grid.channels[k].n])
        pair = CouplingCoefficients(kappa_pr=np.array([kappa_pr]), kappa_c=np.array([kappa_c]))
        T = transfer_analytic(assemble_hmxw(pair), z)
        fields = output_operator_combos(T, pair_grid, Normalization.PHOTON)
        return squeeze_statistics(fields, state, 0)[2]


class TwinBeamPipeline:
    """
    Grid -> dipoles -> susceptibilities -> couplings -> T(z) -> photon statistics.

    Args:
        config: full simulation config.
        model: dipole model overriding the config's dipole section.
    """

    def __init__(self, config: SimulationConfig, model: Optional[DipoleModel] = None):
        self.config = config
        self.cfg: PhysicalConfig = validate_config(config.physical())
        self.derived: DerivedQuantities = derive_quantities(self.cfg)
        self.model = model if model is not None else config.dipole_model()
        self.state = InputState.from_photon_number(
            config.quantum.probe_photon_number, config.quantum.probe_phase
        )
        try:
            self.method = SolverMethod(config.solver.method)
            self.cross_check = (
                SolverMethod(config.solver.cross_check) if config.solver.cross_check else None
            )
        except ValueError as e:
            raise ConfigError(f"solver section: {e}") from e

        target = config.dipole.calibrate_peak_chi
        if model is None and target is not None:
            self.model = calibrate_dipole(self.model, self.grid(), target, self.cfg)

    # ----------------- grid -----------------
    def physical_for(self, q: Optional[int] = None, channels: Optional[Sequence[int]] = None) -> PhysicalConfig:
        changes = {}
        if q is not None:
            changes["probe_order_q"] = int(q)
        if channels is not None:
            changes["channel_orders_n"] = tuple(int(n) for n in channels)
        return self.cfg.with_updates(**changes) if changes else self.cfg

    def grid(self, q: Optional[int] = None, channels: Optional[Sequence[int]] = None) -> ModeGrid:
        return build_mode_grid(self.physical_for(q, channels))

    # ----------------- propagation -----------------
    def propagate(self, grid: ModeGrid, z: Optional[float] = None) -> PropagationResult:
        z = self.cfg.cell_length_z if z is None else z
        dipoles = channel_dipoles(self.model, grid, self.derived)
        chis = susceptibilities(
            grid,
            dipoles,
            self.derived.gas_density_rho,
            self.cfg.dephasing_gamma,
            transition_frequency(self.cfg),
        )
        kappas = kappa(grid, chis)
        H = assemble_hmxw(kappas)
        solver = self.config.solver
        T = transfer_matrix(H, z, self.method, solver.ode_steps, solver.condition_limit)

        delta = float("nan")
        if self.cross_check is not None and self.cross_check is not self.method:
            other = transfer_matrix(H, z, self.cross_check, solver.ode_steps, solver.condition_limit)
            scale = max(float(np.max(np.abs(T.matrix))), 1.0)
            delta = float(np.max(np.abs(T.matrix - other.matrix))) / scale
        return PropagationResult(grid, dipoles, chis, kappas, T, delta, z)

    # ----------------- statistics -----------------
    def reports(self, result: PropagationResult) -> List[SqueezeReport]:
        grid, T = result.grid, result.transfer
        photon = output_operator_combos(T, grid, Normalization.PHOTON)
        field = output_operator_combos(T, grid, Normalization.FIELD)
        residual = symplectic_residual(T, grid)

        reports = []
        for k, ch in enumerate(grid.channels):
            var, snl, snf = squeeze_statistics(photon, self.state, k)
            reports.append(
                SqueezeReport(
                    k=k,
                    n=ch.n,
                    omega_c_over_pu=ch.omega_c / grid.omega_pu,
                    mean_I_pr=mean_intensity(field.probe, self.state),
                    mean_I_ck=mean_intensity(field.conjugate(k), self.state),
                    mean_n_pr=mean_intensity(photon.probe, self.state),
                    mean_n_ck=mean_intensity(photon.conjugate(k), self.state),
                    var=var,
                    var_snl=snl,
                    snf_log10=snf,
                    snf_db=to_db(snf),
                    two_mode_snf_log10=two_mode_snf(result, k, self.state),
                    symplectic_residual=residual,
                    solver_delta=result.solver_delta,
                )
            )
        return reports

    def run(self, q: Optional[int] = None, channels: Optional[Sequence[int]] = None) -> List[SqueezeReport]:
        return self.reports(self.propagate(self.grid(q, channels)))

    def pair_channels(self, n: int) -> Tuple[int, ...]:
        return tuple(sorted(set(self.cfg.channel_orders_n) | {int(n)}))

    def pair(self, q: int, n: int, z: Optional[float] = None) -> SqueezeReport:
        """Multimode run on the configured channels (plus n), reporting channel n."""
        grid = self.grid(q, self.pair_channels(n))
        if n not in grid.channel_orders:
            raise EmptyGridError(f"channel n={n} is not admissible for probe order q={q}")
        reports = self.reports(self.propagate(grid, z))
        return reports[grid.channel_index(n)]

    # ----------------- tables -----------------
    def chi_rows(self, grid: Optional[ModeGrid] = None) -> List[Dict[str, float]]:
        result = self.propagate(grid or self.grid())
        rows = []
        for k, ch in enumerate(result.grid.channels):
            mu = result.dipoles.mu_eg[k]
            rows.append(
                {
                    "n": ch.n,
                    "omega_c_over_pu": ch.omega_c / result.grid.omega_pu,
                    "mu_eg_re": mu.real,
                    "mu_eg_im": mu.imag,
                    "chi_pr_re": result.chis.chi_pr[k].real,
                    "chi_pr_im": result.chis.chi_pr[k].imag,
                    "chi_c_re": result.chis.chi_c[k].real,
                    "chi_c_im": result.chis.chi_c[k].imag,
                    "kappa_pr_re": result.kappas.kappa_pr[k].real,
                    "kappa_pr_im": result.kappas.kappa_pr[k].imag,
                    "kappa_c_re": result.kappas.kappa_c[k].real,
                    "kappa_c_im": result.kappas.kappa_c[k].imag,
                }
            )
        return rows

    def transfer_rows(self, grid: Optional[ModeGrid] = None, z: Optional[float] = None) -> List[Dict[str, float]]:
        T = self.propagate(grid or self.grid(), z).transfer.matrix
        return [
            {"row": i, "col": j, "re": T[i, j].real, "im": T[i, j].imag}
            for i in range(T.shape[0])
            for j in range(T.shape[1])
        ]

    # ----------------- Wigner -----------------
    def wigner(self, n: int) -> Tuple[WignerGrid, Dict[str, float]]:
        """Slice over (x_pr, x_cn) through the peak, all p quadratures zero."""
        section = self.config.wigner
        grid = self.grid(channels=self.pair_channels(n))
        if n not in grid.channel_orders:
            raise EmptyGridError(f"channel n={n} is not admissible for probe order q={grid.probe_order_q}")
        result = self.propagate(grid)
        T = result.transfer
        pair = (0, grid.channel_index(n) + 1)

        gaussian = GaussianWigner(T, self.state.eta, literal=section.literal)
        fixed = np.zeros(2 * grid.n_modes)
        fixed[0::2] = gaussian.center[0::2]
        cx, cy = fixed[2 * pair[0]], fixed[2 * pair[1]]
        slice_grid = wigner_slice_2d(
            T,
            self.state.eta,
            mode_pair=pair,
            x_range=(cx + section.x_range[0], cx + section.x_range[1]),
            y_range=(cy + section.y_range[0], cy + section.y_range[1]),
            samples=tuple(section.samples),
            fixed=fixed,
            literal=section.literal,
        )
        diagnostics = {
            "analytic_slice_integral": wigner_slice_integral_analytic(
                T, self.state.eta, pair, fixed, literal=section.literal
            ),
            "numeric_slice_integral": slice_grid.numeric_integral(),
            "min_symplectic_eigenvalue": min_symplectic_eigenvalue(
                gaussian.covariance("quadrature")
            ),
            "symplectic_residual": symplectic_residual(T, grid),
        }
        slice_grid.metadata.update({"n": n, "x_center": cx, "y_center": cy})
        return slice_grid, diagnostics

    def with_model(self, model: DipoleModel) -> "TwinBeamPipeline":
        return TwinBeamPipeline(self.config, model=model)


def snf_db_at_peak_chi(
    pipeline: TwinBeamPipeline, base_model: DipoleModel, q: int, n: int, peak_chi: float
) -> Tuple[float, DipoleModel]:
    grid = pipeline.grid(q, pipeline.pair_channels(n))
    model = calibrate_dipole(base_model, grid, peak_chi, pipeline.physical_for(q))
    report = pipeline.with_model(model).pair(q, n)
    return report.snf_db, model


def calibrate_to_noise_figure(
    pipeline: TwinBeamPipeline,
    q: int,
    n: int,
    target_db: float,
    start_chi: float = 1.0e-9,
    max_chi: float = 1.0e-2,
    xtol: float = 1.0e-12,
) -> CalibrationResult:
    """
    Find the peak |chi_c| whose common dipole rescaling makes pair (q, n) reach target_db.

    Geometric scan upward from start_chi to bracket the first crossing, then Brent's
    method on log(chi).
    """
    if not target_db < 0:
        raise CalibrationError(f"target_db must be negative (squeezing), got {target_db}")
    base = pipeline.model

    def objective(log_chi: float) -> float:
        value, _ = snf_db_at_peak_chi(pipeline, base, q, n, math.exp(log_chi))
        return value - target_db

    lo = math.log(start_chi)
    f_lo = objective(lo)
    if f_lo <= 0:
        raise CalibrationError(f"already below {target_db} dB at peak chi {start_chi:.3e}")
    hi = lo
    while True:
        hi = lo + math.log(2.0)
        if hi > math.log(max_chi):
            raise CalibrationError(f"{target_db} dB not reached for peak chi up to {max_chi:.1e}")
        if objective(hi) < 0:
            break
        lo = hi

    log_chi = optimize.brentq(objective, lo, hi, xtol=xtol)
    peak = math.exp(log_chi)
    snf_db, model = snf_db_at_peak_chi(pipeline, base, q, n, peak)
    logger.success(f"Calibrated pair (q={q}, n={n}): peak chi {peak:.6e} -> {snf_db:.4f} dB")
    return CalibrationResult(
        target_snf_db=target_db,
        peak_chi=peak,
        snf_db=snf_db,
        amplitude_scale=model.calibration_scale / base.calibration_scale,
        model=model,
    )


def current_peak_chi(pipeline: TwinBeamPipeline, q: int, n: int) -> float:
    grid = pipeline.grid(q, pipeline.pair_channels(n))
    return peak_chi_c(pipeline.model, grid, pipeline.physical_for(q))
