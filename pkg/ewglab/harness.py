"""Module in charge of running the scenarios and collecting their checks."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import replace
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Union

import numpy as np

from .config import ScenarioConfig, Tolerances, serialize_config
from .enums import Provenance, Record, ScenarioKind, Spin
from .errors import EmptyBranchError
from .execution import JobManager
from .linalg import DensityMatrix, expm_i, gram_matrix, max_norm
from .measurement import (MeasurementModel, conditional_spin_likelihood, eigen_system, epr_scenario,
                          evolve, evolve_closed_form, expected_spectrum, free_eigenbasis,
                          free_propagator, hamiltonian, interaction_block, interaction_phase,
                          measurement_quality, propagator, propagator_oracle, record_likelihoods,
                          spin_likelihood)
from .oscillator import (OscillatorSpec, PacketSpec, apply_x3p, classical_gap, classical_gap_bound,
                         classical_orbit, energy_eigenstate_variance, evolution_grid,
                         expectations_closed_form, grid_evolve, grid_evolve_series, grid_expectations,
                         hermite_state, minimum_packet, non_hermiticity, packet_grid, packet_state,
                         s_lambda_energy, s_lambda_expectations, s_lambda_grid, s_lambda_state,
                         uniform_grid, x3p_closed_form, x3p_matrix, x3p_peak, x3p_quadrature)
from .plots import emit_plots
from .relative_state import (ResolutionOfUnity, branches, commutes_with_all, conditional_expectation,
                             equivalent_mixture, mixture_from_branches, random_commutant_element,
                             random_density, random_hermitian, random_resolution,
                             records_from_observer_states)
from .relativistic import (MomentumGrid, MomentumWavefunction, adjoint_asymmetry,
                           asymmetry_closed_form, invariant_inner, limit_study,
                           nonrelativistic_position_element, position_element, random_wavefunction)
from .report import Check, RunReport, ScenarioResult, Series, collect
from .scenarios import Scenario
from .utils import MISSING, or_default, spawn_generators

_log = logging.getLogger(__name__)

PAPER = Provenance.paper
TRIVIAL = Provenance.trivial
DERIVED = Provenance.derived


class Harness:
    """Offers the interface to run scenarios.

    Run wide settings are properties; changes apply to every later run.
    """

    def __init__(self, config: ScenarioConfig = MISSING, *, max_workers: int = 4) -> None:
        config = or_default(config, ScenarioConfig())
        self._job_manager: JobManager = JobManager(max_workers=max_workers)
        self._config: ScenarioConfig = config
        self._seed: int = config.seed
        self._output_dir: Path = Path(config.output_dir)
        self._tolerances: Tolerances = Tolerances()
        self._write_plots: bool = config.plots
        if config.tolerances != self._tolerances:
            self.tolerances = config.tolerances

    @property
    def seed(self) -> int:
        """Seed of every random draw. Each scenario derives its own generator from
        it, so results do not depend on which scenarios run or in which order.

        Raises:
            ValueError: if the seed is negative or does not fit 64 bits
        """
        return self._seed

    @seed.setter
    def seed(self, value: int) -> None:
        if not 0 <= value < 2**64:
            raise ValueError('seed must fit an unsigned 64 bit integer')
        self._seed = int(value)
        _log.info(f'parameter "seed" value set to {self._seed}')

    @property
    def output_dir(self) -> Path:
        """Directory receiving the CSV and SVG files."""
        return self._output_dir

    @output_dir.setter
    def output_dir(self, value: Union[str, Path]) -> None:
        self._output_dir = Path(value)
        _log.info(f'parameter "output_dir" value set to {self._output_dir}')

    @property
    def tolerances(self) -> Tolerances:
        """Tolerances of the checks. Loosening one above its default is allowed
        but logged as a warning."""
        return self._tolerances

    @tolerances.setter
    def tolerances(self, value: Tolerances) -> None:
        defaults = Tolerances()
        for name in ('exact', 'quadrature', 'weight'):
            new = getattr(value, name)
            if not new > 0:
                raise ValueError(f'tolerance {name} must be positive')
            if new > getattr(defaults, name):
                _log.warning(f'tolerance "{name}" loosened to {new:g} (default {getattr(defaults, name):g})')
        self._tolerances = value
        _log.info(f'parameter "tolerances" value set to {value}')

    @property
    def write_plots(self) -> bool:
        """Specifies whether SVG plots are written with the CSV files. Defaults to True."""
        return self._write_plots

    @write_plots.setter
    def write_plots(self, value: bool) -> None:
        self._write_plots = bool(value)
        _log.info(f'parameter "write_plots" value set to {value}')

    @property
    def max_workers(self) -> int:
        """Scenarios running at the same time. 1 runs them one after the other."""
        return self._job_manager.max_workers

    @max_workers.setter
    def max_workers(self, value: int) -> None:
        self._job_manager.max_workers = value
        _log.info(f'parameter "max_workers" value set to {value}')

    @property
    def config(self) -> ScenarioConfig:
        """The scenario document with the current settings applied."""
        return replace(self._config, seed=self._seed, output_dir=str(self._output_dir),
                       tolerances=self._tolerances, plots=self._write_plots)

    def run(self, scenario: Union[ScenarioKind, str] = MISSING, *, write: bool = True) -> RunReport:
        """Runs the scenarios of ``scenario`` (default: the document's choice).

        Scenario errors never abort the run: they are logged, reported as a
        failed check and the checks gathered before the error are kept.

        Keyword args:
            write: write CSV files (and plots if enabled) to ``output_dir``

        Returns:
            the report, in configuration order
        """
        selected = Scenario.select(or_default(scenario, self._config.scenario))
        generators = dict(zip(Scenario, spawn_generators(self._seed, len(Scenario))))
        jobs = [(s.key, partial(self._run_scenario, s, generators[s])) for s in selected]
        started = time.perf_counter()
        outcomes = self._job_manager.run(jobs)
        results = []
        for scenario_, outcome in zip(selected, outcomes):
            if outcome.ok:
                results.append(outcome.result)
            else:
                failed = ScenarioResult(scenario_, error=str(outcome.error))
                results.append(failed)
        report = collect(results)
        report.wall_clock = time.perf_counter() - started
        report.config_text = serialize_config(self.config)
        if write:
            report.write(self._output_dir)
            if self._write_plots:
                emit_plots(report, self._output_dir)
        _log.info(f'run finished: {len(report.checks) - len(report.failed_checks)}/{len(report.checks)} '
                  f'checks passed in {report.wall_clock:.1f}s')
        return report

    def _run_scenario(self, scenario: Scenario, rng: np.random.Generator) -> ScenarioResult:
        result = ScenarioResult(scenario, series=Series(scenario))
        runner: Callable[[ScenarioResult, np.random.Generator], None] = getattr(self, f'run_{scenario.name.lower()}')
        _log.info(f'scenario "{scenario}" started')
        try:
            runner(result, rng)
        except Exception as e:
            result.error = f'{type(e).__name__}: {e}'
            result.add(Check.holds('scenario completed', scenario.key, False, TRIVIAL, detail=result.error))
        else:
            _log.info(f'scenario "{scenario}" finished with {len(result.checks)} checks')
        return result

    def run_measurement(self, result: ScenarioResult, rng: np.random.Generator) -> None:
        """Spin measurement: propagator oracles, likelihood tables and the singlet pair."""
        cfg = self._config.measurement
        tol = self._tolerances
        key = result.scenario.key
        series = result.series
        assert series is not None
        times = cfg.times()
        T_m = cfg.T_m
        rho0 = DensityMatrix.from_vector([1.0, 1.0])
        for theta in cfg.thetas:
            model = MeasurementModel.spin(theta, T_m, cfg.energies)
            label = f'ϑ={theta:.6g}'
            c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
            gaps: Dict[str, float] = dict.fromkeys(
                ('oracle', 'printed', 'unitary', 'hermitian', 'closed', 'trace', 'sum', 'likelihood',
                 'spin', 'table'), 0.0)
            last: Dict[str, float] = {}
            during_xx: List[float] = []
            xx_empty_after = True
            identity = np.eye(model.dim)
            k = interaction_block(model)
            for t in times:
                t = float(t)
                u = propagator(model, t)
                gaps['oracle'] = max(gaps['oracle'], max_norm(u - propagator_oracle(model, t)))
                if 0 <= t <= T_m:
                    printed = free_propagator(model, t) @ expm_i(k, t).conj().T
                    gaps['printed'] = max(gaps['printed'], max_norm(u - printed))
                gaps['unitary'] = max(gaps['unitary'], max_norm(u @ u.conj().T - identity))
                h = hamiltonian(model, t)
                gaps['hermitian'] = max(gaps['hermitian'], max_norm(h - h.conj().T))
                state = evolve(model, rho0, t)
                closed = evolve_closed_form(model, rho0, t)
                gaps['closed'] = max(gaps['closed'], max_norm(state.rho.matrix - closed.rho.matrix))
                gaps['trace'] = max(gaps['trace'], abs(state.rho.trace - 1.0))
                phi = interaction_phase(t, T_m)
                likelihoods = record_likelihoods(state)
                gaps['sum'] = max(gaps['sum'], abs(sum(likelihoods.values()) - 1.0))
                if 0 <= t <= 2 * T_m:
                    expected = {Record.up: math.sin(phi) ** 2 / 2, Record.dn: math.sin(phi) ** 2 / 2,
                                Record.xx: math.cos(phi) ** 2}
                    gaps['likelihood'] = max(gaps['likelihood'],
                                             max(abs(likelihoods[r] - expected[r]) for r in Record))
                gaps['spin'] = max(gaps['spin'], abs(spin_likelihood(state, Spin.up) - 0.5))
                for record in Record:
                    try:
                        p1 = conditional_spin_likelihood(state, record, 1, threshold=tol.weight)
                        p2 = conditional_spin_likelihood(state, record, 2, threshold=tol.weight)
                    except EmptyBranchError:
                        p1 = p2 = None
                    series.add(t, phi, float(theta), str(record), likelihoods[record], p1, p2)
                    if t >= T_m and record != Record.xx and p1 is not None and p2 is not None:
                        e1, e2 = (c2, s2) if record == Record.up else (s2, c2)
                        gaps['table'] = max(gaps['table'], abs(p1 - e1), abs(p2 - e2))
                        last[f'{record}1'], last[f'{record}2'] = p1, p2
                    elif t >= T_m and record != Record.xx:
                        gaps['table'] = math.inf
                    if record == Record.xx:
                        if 0 < t < T_m and p1 is not None:
                            during_xx.append(p1)
                        if t >= T_m and p1 is not None:
                            xx_empty_after = False
            _log.debug(f'{label}: measurement quality {measurement_quality(theta)}')
            result.add(Check.at_most(f'closed form U(t) equals exp(iH\'t) with reversed interaction, {label}',
                                     key, gaps['oracle'], tol.oracle, DERIVED))
            result.add(Check.at_most(f'closed form U(t) equals U0(t)exp(iKt)* on [0, T_m], {label}',
                                     key, gaps['printed'], tol.oracle, DERIVED))
            result.add(Check.at_most(f'U(t) unitary, {label}', key, gaps['unitary'], tol.exact, DERIVED))
            result.add(Check.at_most(f'H(t) Hermitian, {label}', key, gaps['hermitian'], tol.exact, DERIVED))
            result.add(Check.at_most(f'U(t)ρ(0)U(t)* equals block closed form, {label}', key,
                                     gaps['closed'], tol.oracle, DERIVED))
            result.add(Check.at_most(f'trace preserved, {label}', key, gaps['trace'], tol.exact, DERIVED))
            result.add(Check.at_most(f'record likelihoods sum to 1, {label}', key, gaps['sum'], tol.exact,
                                     DERIVED))
            result.add(Check.at_most(f'record likelihoods ½sin²φ, ½sin²φ, cos²φ, {label}', key,
                                     gaps['likelihood'], tol.oracle, PAPER))
            result.add(Check.at_most(f'spin up likelihood stays Trace(P1ρ0), {label}', key, gaps['spin'],
                                     tol.exact, DERIVED))
            for name, value in last.items():
                record, spin = name[:-1], name[-1]
                expected_value = (c2 if (record == 'up') == (spin == '1') else s2)
                result.add(Check.close(f'spin {spin} given record {record} after interaction, {label}', key,
                                       value, expected_value, tol.oracle, PAPER))
            result.add(Check.at_most(f'conditional table holds for every t >= T_m, {label}', key,
                                     gaps['table'], tol.oracle, DERIVED))
            if during_xx:
                result.add(Check.close(f'spin 1 given record xx during interaction, {label}', key,
                                       max(during_xx, key=lambda v: abs(v - 0.5)), 0.5, tol.oracle, PAPER))
            result.add(Check.holds(f'record xx branch empty after interaction, {label}', key,
                                   xx_empty_after, DERIVED))
            self._check_eigensystem(result, model, label)
            self._check_pair(result, theta, times, label)

    def _check_eigensystem(self, result: ScenarioResult, model: MeasurementModel, label: str) -> None:
        tol = self._tolerances
        key = result.scenario.key
        h = hamiltonian(model, model.T_m / 2)
        values = np.linalg.eigvalsh(h)
        result.add(Check.at_most(f'spectrum of H is E_w, E_w ± π/(2T_m), {label}', key,
                                 float(np.max(np.abs(values - expected_spectrum(model)))), tol.oracle, PAPER))
        residual = orthogonality = 0.0
        labels_match = True
        pairing = []
        for energy, w in free_eigenbasis(model):
            pairs = eigen_system(model, w, energy, reverse_interaction=True)
            residual = max([residual] + [p.residual for p in pairs.values()])
            gram = gram_matrix([p.vector for p in pairs.values()])
            orthogonality = max(orthogonality, max_norm(gram - np.eye(3)))
            labels_match = labels_match and all(p.paired_as_printed for p in pairs.values())
            e_plus = pairs['+'].vector
            pairing.append(float(np.vdot(e_plus, h @ e_plus).real) - energy)
        result.add(Check.at_most(f'closed form eigenvector residual, {label}', key, residual, tol.oracle, DERIVED))
        result.add(Check.at_most(f'closed form eigenvectors orthonormal, {label}', key, orthogonality,
                                 tol.exact / 100, DERIVED))
        result.add(Check.holds(f'e± carry E_w ± π/(2T_m) under the reversed interaction, {label}', key,
                               labels_match, DERIVED))
        result.add(Check.close(f'displayed H pairs e+ with E_w - π/(2T_m), {label}', key,
                               max(pairing, key=lambda v: abs(v + model.rate)), -model.rate, tol.oracle, DERIVED,
                               detail='sign pairing determined numerically'))

    def _check_pair(self, result: ScenarioResult, theta: float, times: np.ndarray, label: str) -> None:
        cfg = self._config.measurement
        tol = self._tolerances
        key = result.scenario.key
        model = MeasurementModel.spin_pair(theta, cfg.T_m, cfg.energies)
        c2 = math.cos(theta) ** 2
        total_spin = 0.0
        down_given_up: List[float] = []
        up_given_up: List[float] = []
        for t in times:
            table = epr_scenario(model, float(t), threshold=tol.weight)
            total_spin = max(total_spin, max(abs(s) for s in table.total_spin))
            partner = table.partner_spin[Record.up]
            if t >= cfg.T_m and partner is not None:
                up_given_up.append(partner[0])
                down_given_up.append(partner[1])
        result.add(Check.at_most(f'pair total spin vanishes, {label}', key, total_spin, tol.exact, DERIVED))
        if down_given_up:
            result.add(Check.close(f'partner down given record up is cos²ϑ, {label}', key,
                                   max(down_given_up, key=lambda v: abs(v - c2)), c2, tol.oracle, DERIVED))
            result.add(Check.close(f'partner up given record up is sin²ϑ, {label}', key,
                                   max(up_given_up, key=lambda v: abs(v - (1 - c2))), 1 - c2, tol.oracle,
                                   TRIVIAL))

    def run_relstate(self, result: ScenarioResult, rng: np.random.Generator) -> None:
        """Relative states of random density matrices and resolutions of unity."""
        cfg = self._config.relstate
        tol = self._tolerances
        key = result.scenario.key
        series = result.series
        assert series is not None
        gaps = dict.fromkeys(('commutant', 'non_commutant', 'weights', 'idempotent', 'dual', 'mixture'), 0.0)
        commutes = True
        for i in range(cfg.samples):
            dim = int(rng.integers(2, cfg.max_dim + 1))
            n_blocks = int(rng.integers(2, min(cfg.max_blocks, dim) + 1))
            rho = random_density(rng, dim)
            resolution, basis, sizes = random_resolution(rng, dim, n_blocks)
            a = random_commutant_element(rng, basis, sizes)
            b = random_hermitian(rng, dim)
            commutes = commutes and commutes_with_all(a, resolution, tol.exact)
            mixture = equivalent_mixture(rho, resolution)
            gap = abs(rho.expectation(a) - mixture.expectation(a))
            non_gap = abs(rho.expectation(b) - mixture.expectation(b))
            gaps['commutant'] = max(gaps['commutant'], gap)
            gaps['non_commutant'] = max(gaps['non_commutant'], non_gap)
            weight_sum = sum(float(np.trace(q.matrix @ rho.matrix).real) for _, q in resolution)
            gaps['weights'] = max(gaps['weights'], abs(weight_sum - 1.0))
            again = equivalent_mixture(mixture, resolution)
            gaps['idempotent'] = max(gaps['idempotent'], max_norm(again.matrix - mixture.matrix))
            parts = branches(rho, resolution, threshold=tol.weight)
            for record, part in parts.items():
                if part is None:
                    continue
                conditional = conditional_expectation(rho, resolution[record], a, threshold=tol.weight)
                gaps['dual'] = max(gaps['dual'], abs(conditional - part.rho_theta.expectation(a)))
            gaps['mixture'] = max(gaps['mixture'],
                                  max_norm(mixture_from_branches(parts).matrix - mixture.matrix))
            series.add(i, dim, n_blocks, gap, non_gap)
        result.add(Check.at_most('Trace(Aρ) = Trace(Aρ^eq) for A in the commutant', key, gaps['commutant'],
                                 tol.exact, PAPER, detail=f'{cfg.samples} random samples'))
        result.add(Check.exceeds('Trace(Aρ) != Trace(Aρ^eq) for some A outside the commutant', key,
                                 gaps['non_commutant'], 1e-3, DERIVED))
        result.add(Check.holds('sampled commutant elements commute with every Q_θ', key, commutes, DERIVED))
        result.add(Check.at_most('branch weights sum to 1', key, gaps['weights'], tol.exact, DERIVED))
        result.add(Check.at_most('ρ^eq is a fixed point of the mixture', key, gaps['idempotent'],
                                 tol.exact / 100, DERIVED))
        result.add(Check.at_most('conditional expectation equals Trace(Aρ^θ)', key, gaps['dual'],
                                 tol.exact / 100, DERIVED))
        result.add(Check.at_most('Σ ρ^θ/c_θ equals Σ QρQ', key, gaps['mixture'], tol.exact / 100, DERIVED))
        diagonal = DensityMatrix(np.diag([0.25, 0.75]))
        coordinates = ResolutionOfUnity.from_blocks([1, 1], ['first', 'second'])
        result.add(Check.at_most('diagonal ρ equals its mixture', key,
                                 max_norm(equivalent_mixture(diagonal, coordinates).matrix - diagonal.matrix),
                                 tol.exact, TRIVIAL))
        observers = records_from_observer_states([[1.0, 0.0], [1.0, 1.0]], 2, ['ready', 'seen'])
        result.add(Check.at_most('observer records resolve the identity', key,
                                 max_norm(sum(q.matrix for _, q in observers) - np.eye(4)), tol.exact, TRIVIAL))

    def run_oscillator(self, result: ScenarioResult, rng: np.random.Generator) -> None:
        """Minimum packets, the classical limit of x³p and the Crank-Nicolson oracle."""
        cfg = self._config.oscillator
        tol = self._tolerances
        key = result.scenario.key
        series = result.series
        assert series is not None
        spec = OscillatorSpec(cfg.m, cfg.k, cfg.hbar)
        packet = PacketSpec.create(spec, cfg.amplitude_ratio * spec.sigma)
        bound = classical_gap_bound(spec, packet)
        scale = spec.sqrt_mk * packet.A**4
        max_gap = formula_gap = energy_drift = 0.0
        energy0 = packet.E
        for t in np.linspace(0.0, cfg.periods * spec.period, cfg.samples):
            t = float(t)
            closed = expectations_closed_form(spec, packet, t)
            quantum = x3p_closed_form(spec, packet, t)
            orbit = classical_orbit(spec, packet, t)
            gap = classical_gap(spec, packet, t)
            max_gap = max(max_gap, abs(gap))
            formula_gap = max(formula_gap, abs(gap - bound * math.sin(2 * spec.w * t)) / bound)
            energy = orbit.p**2 / (2 * spec.m) + spec.k * orbit.x**2 / 2
            energy_drift = max(energy_drift, abs(energy - energy0) / energy0)
            series.add(t, closed.meanX, closed.meanP, quantum, orbit.x3p, gap)
        result.add(Check.close('max |x³p - ⟨X^(3/2)PX^(3/2)⟩| equals (3/2)√(mk)A²σ²', key, max_gap, bound,
                               tol.quadrature, PAPER, scale=bound))
        result.add(Check.close('gap bound over √(mk)A⁴ equals (3/2)σ²/A²', key, bound / scale,
                               1.5 * spec.sigma2 / packet.A**2, tol.exact / 100, PAPER, scale=bound / scale))
        result.add(Check.at_most('gap follows (3/2)√(mk)A²σ² sin 2wt', key, formula_gap, tol.oracle, DERIVED))
        result.add(Check.at_most('classical energy conserved', key, energy_drift, tol.exact / 100, TRIVIAL))
        self._check_scaling(result, spec)
        self._check_packet_quadrature(result, spec, packet)
        self._check_eigenstates(result, spec)
        self._check_evolution(result, spec, packet)

    def _check_scaling(self, result: ScenarioResult, spec: OscillatorSpec) -> None:
        cfg = self._config.oscillator
        key = result.scenario.key
        ratios = sorted(cfg.ratios, reverse=True)
        relative = [classical_gap_bound(spec, p) / x3p_peak(spec, p)
                    for p in (PacketSpec.for_ratio(spec, r) for r in ratios)]
        slope = 8 / math.sqrt(3)
        spread = max(abs(q / r - slope) / slope for q, r in zip(relative, ratios))
        result.add(Check.at_most('gap over max|x³p| is linear in σ²/A²', key, spread, self._tolerances.exact / 100,
                                 DERIVED, detail=f'ratios {ratios}'))
        result.add(Check.holds('gap over max|x³p| decreases as σ²/A² decreases', key,
                               all(b < a for a, b in zip(relative, relative[1:])), DERIVED))

    def _check_packet_quadrature(self, result: ScenarioResult, spec: OscillatorSpec, packet: PacketSpec) -> None:
        tol = self._tolerances
        key = result.scenario.key
        grid = packet_grid(spec, packet)
        scale = spec.sqrt_mk * packet.A**4
        hbar = spec.hbar
        gaps = dict.fromkeys(('norm', 'meanX', 'meanP', 'varX', 'varP', 'product', 'x3p', 'imag', 'phase'), 0.0)
        for j in range(16):
            t = j * spec.period / 16
            state = packet_state(spec, packet, t, grid=grid)
            moments = grid_expectations(state, spec)
            closed = expectations_closed_form(spec, packet, t)
            gaps['norm'] = max(gaps['norm'], abs(moments.norm**2 - 1.0))
            gaps['meanX'] = max(gaps['meanX'], abs(moments.meanX - closed.meanX) / packet.A)
            gaps['meanP'] = max(gaps['meanP'], abs(moments.meanP - closed.meanP) / packet.beta)
            gaps['varX'] = max(gaps['varX'], abs(moments.varX - closed.varX) / closed.varX)
            gaps['varP'] = max(gaps['varP'], abs(moments.varP - closed.varP) / closed.varP)
            gaps['product'] = max(gaps['product'], abs(moments.uncertainty_product - hbar / 2) / (hbar / 2))
            value = x3p_quadrature(state, spec)
            gaps['x3p'] = max(gaps['x3p'], abs(value.real - x3p_closed_form(spec, packet, t)) / scale)
            gaps['imag'] = max(gaps['imag'], abs(value.imag))
            bare = grid_expectations(packet_state(spec, packet, t, grid=grid, include_phase=False), spec)
            gaps['phase'] = max(gaps['phase'], max(abs(u - v) for u, v in zip(moments, bare)))
            if j == 0:
                result.add(Check.at_most('x3p quadrature vanishes at t = 0', key, abs(value), tol.quadrature, TRIVIAL))
        result.add(Check.at_most('packet norm is 1', key, gaps['norm'], tol.quadrature / 100, DERIVED))
        result.add(Check.at_most('quadrature ⟨X⟩ equals A cos wt', key, gaps['meanX'], tol.quadrature, PAPER))
        result.add(Check.at_most('quadrature ⟨P⟩ equals -√(mk)A sin wt', key, gaps['meanP'], tol.quadrature, PAPER))
        result.add(Check.at_most('quadrature position variance equals σ²', key, gaps['varX'], tol.quadrature, PAPER))
        result.add(Check.at_most('quadrature momentum variance equals ħ²/(4σ²)', key, gaps['varP'],
                                 tol.quadrature, PAPER))
        result.add(Check.at_most('quadrature uncertainty product equals ħ/2', key, gaps['product'],
                                 tol.quadrature, DERIVED))
        result.add(Check.close('closed form uncertainty product equals ħ/2', key,
                               expectations_closed_form(spec, packet, 0.3).uncertainty_product, hbar / 2,
                               tol.quadrature / 100, PAPER))
        result.add(Check.at_most('x3p quadrature matches closed form at 16 times', key, gaps['x3p'],
                                 10 * tol.quadrature, DERIVED, detail='relative to √(mk)A⁴'))
        result.add(Check.at_most('x3p expectation of packets is real', key, gaps['imag'], tol.quadrature, DERIVED))
        result.add(Check.at_most('global phase cancels in expectations', key, gaps['phase'], tol.exact, DERIVED))
        peak = abs(complex(minimum_packet(spec, packet, 0.0, [packet.A])[0]))
        result.add(Check.close('packet peak modulus is (2πσ²)^(-1/4)', key, peak,
                               (2 * math.pi * spec.sigma2) ** -0.25, tol.exact, TRIVIAL))

    def _check_eigenstates(self, result: ScenarioResult, spec: OscillatorSpec) -> None:
        tol = self._tolerances
        key = result.scenario.key
        length = math.sqrt(spec.hbar / (spec.m * spec.w))
        grid = uniform_grid(-15 * length, 15 * length, length / 100)
        variance_gap = mean_gap = 0.0
        for n in range(5):
            state = hermite_state(n, spec, grid)
            moments = grid_expectations(state, spec)
            expected = energy_eigenstate_variance(n, spec)
            second = state.integral(grid.x**2 * abs(state.values) ** 2).real / moments.norm**2
            variance_gap = max(variance_gap, abs(second - expected.variance) / expected.variance)
            mean_gap = max(mean_gap, abs(moments.meanX), abs(moments.meanP))
        result.add(Check.at_most('⟨s_n|X² s_n⟩ equals (n + ½)ħ/(mw) for n <= 4', key, variance_gap,
                                 tol.quadrature / 10, DERIVED))
        result.add(Check.at_most('⟨s_n|X s_n⟩ and ⟨s_n|P s_n⟩ vanish', key, mean_gap, tol.quadrature, PAPER))
        result.add(Check.close('ground state variance equals the packet σ²', key,
                               energy_eigenstate_variance(0, spec).variance, spec.sigma2, tol.exact, TRIVIAL,
                               scale=spec.sigma2))

    def _check_evolution(self, result: ScenarioResult, spec: OscillatorSpec, packet: PacketSpec) -> None:
        cfg = self._config.oscillator
        key = result.scenario.key
        grid = evolution_grid(spec, packet)
        state0 = packet_state(spec, packet, 0.0, grid=grid)
        times = [j * spec.period / 16 for j in range(17)]
        states = grid_evolve_series(state0, spec, times, steps_per_period=cfg.steps_per_period)
        position_gap = norm_drift = product_gap = 0.0
        norm0 = state0.norm()
        half = 0.0
        for j, (t, state) in enumerate(zip(times, states)):
            moments = grid_expectations(state, spec)
            position_gap = max(position_gap, abs(moments.meanX - packet.A * math.cos(spec.w * t)))
            norm_drift = max(norm_drift, abs(state.norm() - norm0))
            product_gap = max(product_gap, abs(moments.uncertainty_product - spec.hbar / 2) / (spec.hbar / 2))
            if j == 8:
                half = moments.meanX
        result.add(Check.at_most('evolved ⟨X⟩ follows A cos wt over one period', key, position_gap,
                                 1e-3 * packet.A, DERIVED))
        result.add(Check.close('evolved ⟨X⟩ at half period is -A', key, half, -packet.A, 1e-3, DERIVED,
                               scale=packet.A))
        result.add(Check.at_most('evolution preserves the norm', key, norm_drift, self._tolerances.quadrature,
                                 DERIVED))
        result.add(Check.at_most('evolved uncertainty product stays ħ/2', key, product_gap, 1e-4, DERIVED))
        ground = hermite_state(0, spec, grid).normalized()
        later = grid_evolve(ground, spec, spec.period / 2, steps_per_period=cfg.steps_per_period)
        overlap = abs(ground.inner(later))
        result.add(Check.close('ground state is stationary', key, overlap, 1.0, self._tolerances.quadrature,
                               DERIVED))

    def run_x3p_eigen(self, result: ScenarioResult, rng: np.random.Generator) -> None:
        """Square summable eigenfunctions of x³p with imaginary eigenvalues."""
        cfg = self._config.x3p_eigen
        tol = self._tolerances
        key = result.scenario.key
        series = result.series
        assert series is not None
        spec = OscillatorSpec(hbar=cfg.hbar)
        hbar = spec.hbar
        for lam in cfg.lambdas:
            label = f'λ={lam:g}'
            moments = s_lambda_expectations(lam, spec)
            result.add(Check.close(f'∫s_λ² = 1, {label}', key, moments.norm**2, 1.0, tol.quadrature / 100, PAPER))
            root = math.sqrt(math.pi * lam)
            result.add(Check.close(f'⟨X⟩ = √(πλ), {label}', key, moments.meanX, root, tol.quadrature, PAPER,
                                   scale=root))
            result.add(Check.at_most(f'⟨P⟩ = 0, {label}', key, abs(moments.meanP), tol.quadrature / 100, PAPER))
            result.add(Check.at_most(f'Re⟨X^(3/2)PX^(3/2)⟩ = 0, {label}', key, abs(moments.x3p.real),
                                     tol.quadrature * hbar * lam, PAPER))
            result.add(Check.close(f'Im⟨X^(3/2)PX^(3/2)⟩ = -ħλ, {label}', key, moments.x3p.imag, -hbar * lam,
                                   10 * tol.quadrature, PAPER, scale=hbar * lam))
            local = s_lambda_state(lam, grid=s_lambda_grid(lam, upper=1e3 * math.sqrt(lam)))
            residual = local.with_values(apply_x3p(local, spec).values + 1j * hbar * lam * local.values)
            result.add(Check.at_most(f'x3p s_λ = -iħλ s_λ on the grid, {label}', key,
                                     residual.norm() / local.norm(), 1e-4, DERIVED))
            half_line = uniform_grid(0.05 * math.sqrt(lam), 20 * math.sqrt(lam), 0.05 * math.sqrt(lam))
            asymmetry = non_hermiticity(x3p_matrix(half_line, spec))
            result.add(Check.exceeds(f'discretized x3p is not Hermitian, {label}', key, asymmetry,
                                     1e3 * tol.quadrature, DERIVED))
            energies = s_lambda_energy(lam, spec, [1e2 * math.sqrt(lam), 1e4 * math.sqrt(lam), 1e6 * math.sqrt(lam)])
            result.add(Check.holds(f'⟨s_λ|H s_λ⟩ grows with the cutoff, {label}', key,
                                   bool(np.all(np.diff(energies) > 0)), DERIVED,
                                   detail=' '.join(f'{e:.6g}' for e in energies)))
            series.add(float(lam), moments.norm, moments.meanX, abs(moments.meanP), moments.x3p.real,
                       moments.x3p.imag, asymmetry)

    def run_relpos(self, result: ScenarioResult, rng: np.random.Generator) -> None:
        """Asymmetry of position under the invariant inner product and its large mass limit."""
        cfg = self._config.relpos
        tol = self._tolerances
        key = result.scenario.key
        series = result.series
        assert series is not None
        hbar = cfg.hbar
        grid = MomentumGrid.for_gaussian(cfg.p0, cfg.width)
        f = MomentumWavefunction.gaussian(grid, cfg.masses[0], cfg.p0, cfg.width)
        study = limit_study(f, f, cfg.masses, hbar=hbar)
        closed_gap = real_part = 0.0
        for row in study.rows:
            fm = f.with_mass(row.m)
            closed = asymmetry_closed_form(fm, fm, hbar=hbar)
            closed_gap = max(closed_gap, abs(row.asymmetry - closed) / abs(closed))
            real_part = max(real_part, abs(row.asymmetry.real) / abs(row.asymmetry))
            series.add(row.m, row.inner.real, row.position.real, row.position.imag, row.asymmetry.real,
                       row.asymmetry.imag, row.ratio)
        result.add(Check.at_most('asymmetry equals iħ∫conj(f)g p/(2ω³)', key, closed_gap, tol.quadrature, DERIVED))
        result.add(Check.at_most('asymmetry of f with itself is imaginary', key, real_part, tol.exact, DERIVED))
        slope = study.slope if study.slope is not None else math.nan
        result.add(Check.close('asymmetry ratio scales as m^-2', key, slope, -2.0, 0.1, DERIVED,
                               detail=f'masses {list(cfg.masses)}'))
        result.add(Check.holds('asymmetry ratio decreases with the mass', key, study.monotone, DERIVED))
        heaviest = f.with_mass(cfg.masses[-1])
        partner = MomentumWavefunction.gaussian(grid, heaviest.mass, cfg.p0, cfg.width, hermite=1)
        nonrelativistic = nonrelativistic_position_element(heaviest, partner, hbar=hbar)
        result.add(Check.at_most('position element approaches its nonrelativistic form', key,
                                 abs(position_element(heaviest, partner, hbar=hbar) - nonrelativistic)
                                 / abs(nonrelativistic), 1e-3, DERIVED, detail=f'm = {heaviest.mass:g}'))
        centered = MomentumGrid.for_gaussian(0.0, 1.0)
        even = MomentumWavefunction.gaussian(centered, 1.0)
        result.add(Check.at_most('even amplitudes have no asymmetry', key,
                                 abs(adjoint_asymmetry(even, even, hbar=hbar)), tol.exact, TRIVIAL))
        result.add(Check.at_most('even amplitudes have ⟨f|xf⟩ = 0', key,
                                 abs(position_element(even, even, hbar=hbar)), tol.exact, TRIVIAL))
        odd = MomentumWavefunction.gaussian(centered, 1.0, hermite=1)
        result.add(Check.at_most('even and odd amplitudes are orthogonal', key, abs(invariant_inner(even, odd)),
                                 tol.exact, TRIVIAL))
        heavy = even.with_mass(100.0)
        expected = math.sqrt(math.pi) / 200
        result.add(Check.close('large mass inner product is ∫|f|²dp/(2m)', key, invariant_inner(heavy, heavy).real,
                               expected, 1e-2, DERIVED, scale=expected))
        self._check_random_pairs(result, rng)

    def _check_random_pairs(self, result: ScenarioResult, rng: np.random.Generator) -> None:
        tol = self._tolerances
        key = result.scenario.key
        hbar = self._config.relpos.hbar
        grid = MomentumGrid.build(20.0)
        symmetry = identity = 0.0
        smallest = math.inf
        for _ in range(100):
            f = random_wavefunction(rng, grid, 1.0)
            g = random_wavefunction(rng, grid, 1.0)
            symmetry = max(symmetry, abs(invariant_inner(f, g) - invariant_inner(g, f).conjugate()))
            ff, gg = invariant_inner(f, f).real, invariant_inner(g, g).real
            smallest = min(smallest, ff, gg)
            asym = adjoint_asymmetry(f, g, hbar=hbar)
            closed = asymmetry_closed_form(f, g, hbar=hbar)
            identity = max(identity, abs(asym - closed) / (abs(asym) + ff + gg))
        result.add(Check.at_most('invariant inner product is conjugate symmetric', key, symmetry,
                                 tol.exact / 100, DERIVED, detail='100 random pairs'))
        result.add(Check.exceeds('invariant norm is positive', key, smallest, 0.0, DERIVED))
        result.add(Check.at_most('asymmetry identity for random mixtures', key, identity, tol.quadrature, DERIVED))


def run(config: ScenarioConfig, *, write: bool = True, max_workers: int = 4) -> RunReport:
    """Runs ``config`` with a fresh :class:`Harness`."""
    return Harness(config, max_workers=max_workers).run(write=write)
