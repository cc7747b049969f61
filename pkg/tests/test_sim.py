"""Integrators, trajectory checks, element waveforms, and hysteresis."""

import dataclasses
from pathlib import Path

import numpy as np
import pytest

from memlag.constitutive import (
    Element,
    ElementKind,
    Modulation,
    ScalarCurve,
    SourceWaveform,
)
from memlag.errors import (
    DomainExitError,
    MemlagError,
    NumericError,
    StepUnderflowError,
)
from memlag.lagrangian import build_loop_system, build_node_system, to_first_order
from memlag.netlist import parse
from memlag.sim import (
    Trajectory,
    _rk45_adaptive,
    branch_waveforms,
    drive_element,
    drive_csv,
    ikvl_residual,
    integrate,
    pinch_check,
    traversed_gain_bound,
    waveforms_csv,
)

NETLIST_DIR = Path(__file__).resolve().parent.parent / "demos" / "netlists"

CUBIC = (0.0, 1.0, 0.0, 1.0 / 3.0)


def lc_system(L=1.0, C=1.0, amp=None, omega=None):
    lines = [
        "circuit lc formulation loop coords 1",
        f"element L1 L value={L} coords +1",
        f"element C1 C value={C} coords +1",
    ]
    if amp is not None:
        lines.append(f"element V1 VSRC shape=sin amp={amp} omega={omega} "
                     "coords +1")
    return build_loop_system(parse("\n".join(lines) + "\n"))


def two_loop_system():
    text = (NETLIST_DIR / "two_loop.net").read_text()
    circuit = parse(text)
    return circuit, build_loop_system(circuit)


class TestIntegrate:
    def test_oscillator_against_cosine(self):
        sys = lc_system()
        traj = integrate(sys, np.array([1.0]), (0.0, 2 * np.pi),
                         rtol=1e-10, atol=1e-12)
        assert np.max(np.abs(traj.x[:, 0] - np.cos(traj.t))) <= 1e-8
        assert np.max(np.abs(traj.v[:, 0] + np.sin(traj.t))) <= 1e-8

    def test_fixed_step_oscillator(self):
        sys = lc_system()
        traj = integrate(sys, np.array([1.0]), (0.0, 2 * np.pi),
                         method="rk4", h=1e-3)
        assert np.max(np.abs(traj.x[:, 0] - np.cos(traj.t))) <= 1e-9
        assert traj.method == "rk4"
        assert traj.h == 1e-3

    def test_fixed_step_is_fourth_order(self):
        sys = lc_system()
        errs = []
        for h in (1e-2, 5e-3, 2.5e-3):
            traj = integrate(sys, np.array([1.0]), (0.0, 2 * np.pi),
                             method="rk4", h=h)
            errs.append(np.max(np.abs(traj.x[:, 0] - np.cos(traj.t))))
        assert 8.0 <= errs[0] / errs[1] <= 32.0
        assert 8.0 <= errs[1] / errs[2] <= 32.0

    def test_equilibrium_stays_at_rest(self):
        sys = lc_system()
        traj = integrate(sys, np.zeros(1), (0.0, 10.0))
        assert np.max(np.abs(traj.x)) == 0.0
        assert np.max(np.abs(traj.v)) == 0.0

    def test_driven_oscillator_golden(self):
        # L = C = 1 driven by e(t) = sin 2t from rest:
        # sigma(t) = -(2/3) cos t + 1/2 + (1/6) cos 2t
        sys = lc_system(amp=1.0, omega=2.0)
        tq = np.linspace(0.0, 10.0, 1001)
        traj = integrate(sys, np.zeros(1), (0.0, 10.0),
                         rtol=1e-10, atol=1e-12, t_eval=tq)
        closed = -(2.0 / 3.0) * np.cos(tq) + 0.5 + np.cos(2 * tq) / 6.0
        assert np.max(np.abs(traj.x[:, 0] - closed)) <= 1e-7

    def test_dense_output_grid_is_exactly_t_eval(self):
        sys = lc_system()
        tq = np.linspace(0.3, 5.7, 401)
        traj = integrate(sys, np.array([1.0]), (0.0, 6.0), t_eval=tq)
        assert np.array_equal(traj.t, tq)
        assert np.max(np.abs(traj.x[:, 0] - np.cos(tq))) <= 1e-6

    def test_packed_initial_state(self):
        circuit, sys = two_loop_system()
        fo = to_first_order(sys)
        y0 = fo.pack(np.array([1.0, 0.0]), np.array([0.5, 0.0]))
        a = integrate(sys, y0, (0.0, 3.0))
        b = integrate(sys, np.array([1.0, 0.0]), (0.0, 3.0),
                      v0=np.array([0.5, 0.0]))
        assert np.array_equal(a.x, b.x)

    def test_first_order_velocity_seed_is_ignored(self):
        circuit, sys = two_loop_system()
        a = integrate(sys, np.array([1.0, 0.0]), (0.0, 3.0),
                      v0=np.array([0.5, 0.0]))
        b = integrate(sys, np.array([1.0, 0.0]), (0.0, 3.0),
                      v0=np.array([0.5, 999.0]))
        assert np.array_equal(a.x, b.x)

    def test_default_velocities_are_zero(self):
        sys = lc_system()
        a = integrate(sys, np.array([0.7]), (0.0, 2.0))
        b = integrate(sys, np.array([0.7]), (0.0, 2.0), v0=np.zeros(1))
        assert np.array_equal(a.x, b.x)

    def test_argument_validation(self):
        sys = lc_system()
        with pytest.raises(MemlagError):
            integrate(sys, np.array([1.0]), (1.0, 0.0))
        with pytest.raises(MemlagError):
            integrate(sys, np.array([1.0, 2.0, 3.0]), (0.0, 1.0))
        with pytest.raises(MemlagError):
            integrate(sys, np.array([1.0]), (0.0, 1.0), method="euler")
        with pytest.raises(MemlagError):
            integrate(sys, np.array([1.0]), (0.0, 1.0), method="rk4")
        with pytest.raises(MemlagError):
            integrate(sys, np.array([1.0]), (0.0, 1.0),
                      t_eval=[0.0, 2.0])
        with pytest.raises(MemlagError):
            integrate(sys, np.array([1.0]), (0.0, 1.0),
                      t_eval=[0.5, 0.5])

    def test_domain_exit_names_the_element(self):
        text = ("circuit b formulation loop coords 1\n"
                "element ML1 ML curve=poly(0,1,0,0.3333333333) "
                "domain=[-0.5,0.5] mod=q coords +1\n"
                "element C1 C value=1.0 coords +1\n")
        sys = build_loop_system(parse(text))
        with pytest.raises(DomainExitError) as err:
            integrate(sys, np.array([2.0]), (0.0, 10.0))
        assert err.value.element == "ML1"
        assert err.value.time is not None


class TestTrajectoryContainer:
    def test_grid_must_increase(self):
        t = np.array([0.0, 1.0, 1.0])
        z = np.zeros((3, 1))
        with pytest.raises(MemlagError):
            Trajectory(t=t, x=z, v=z, a=z, method="rk4", n_steps=2)

    def test_non_finite_rejected(self):
        t = np.array([0.0, 1.0, 2.0])
        z = np.zeros((3, 1))
        bad = z.copy()
        bad[1, 0] = np.inf
        with pytest.raises(NumericError):
            Trajectory(t=t, x=bad, v=z, a=z, method="rk4", n_steps=2)


class TestStepControl:
    def test_blowup_underflows_the_step(self):
        def f(t, y):
            return y * y

        with pytest.raises(StepUnderflowError):
            _rk45_adaptive(f, np.array([1.0]), 0.0, 2.0, 1e-8, 1e-10)

    def test_non_finite_rhs_is_reported(self):
        def f(t, y):
            return np.array([np.nan if t > 0.5 else 1.0])

        with pytest.raises(NumericError) as err:
            _rk45_adaptive(f, np.array([0.0]), 0.0, 1.0, 1e-8, 1e-10)
        assert "non-finite" in str(err.value)


class TestIkvlResidual:
    def test_healthy_trajectory_is_clean(self):
        sys = lc_system()
        traj = integrate(sys, np.array([1.0]), (0.0, 10.0))
        assert ikvl_residual(sys, traj) <= 1e-12

    def test_corrupted_trajectory_is_flagged(self):
        sys = lc_system()
        traj = integrate(sys, np.array([1.0]), (0.0, 10.0))
        corrupt = dataclasses.replace(traj, x=2.0 * traj.x)
        assert ikvl_residual(sys, corrupt) >= 0.5

    def test_coordinate_count_must_match(self):
        sys = lc_system()
        _, sys3 = two_loop_system()
        traj = integrate(sys, np.array([1.0]), (0.0, 1.0))
        with pytest.raises(MemlagError):
            ikvl_residual(sys3, traj)

    @pytest.mark.parametrize("name", sorted(
        p.name for p in NETLIST_DIR.glob("*.net")))
    def test_shipped_netlists_integrate_cleanly(self, name):
        circuit = parse((NETLIST_DIR / name).read_text())
        if circuit.formulation == "loop":
            sys = build_loop_system(circuit)
        else:
            sys = build_node_system(circuit)
        xb, _ = sys.domain_box()
        traj = integrate(sys, 0.25 * xb, (0.0, 5.0))
        assert ikvl_residual(sys, traj) <= 1e-8


class TestEnergy:
    def test_conservative_circuit_holds_energy(self):
        sys = lc_system()
        traj = integrate(sys, np.array([1.0]), (0.0, 20.0),
                         rtol=1e-10, atol=1e-12)
        e = np.array([sys.energy(traj.x[k], traj.v[k])
                      for k in range(len(traj.t))])
        assert np.max(np.abs(e - e[0])) <= 1e-7

    def test_dissipative_circuit_loses_energy(self):
        _, sys = two_loop_system()
        traj = integrate(sys, np.array([1.0, 0.0]), (0.0, 20.0),
                         v0=np.array([0.5, 0.0]), rtol=1e-10, atol=1e-12)
        e = np.array([sys.energy(traj.x[k], traj.v[k])
                      for k in range(len(traj.t))])
        assert np.all(np.diff(e) <= 1e-12)
        assert e[-1] < 0.01 * e[0]


class TestBranchWaveforms:
    def test_loop_flux_balance_closes_exactly(self):
        circuit = parse((NETLIST_DIR / "two_loop_driven.net").read_text())
        sys = build_loop_system(circuit)
        traj = integrate(sys, np.array([1.0, 0.0]), (0.0, 8.0),
                         v0=np.array([0.5, 0.0]),
                         t_eval=np.linspace(0.0, 8.0, 801))
        waves = branch_waveforms(circuit, traj)
        for i in range(circuit.n_coords):
            balance = np.zeros(len(traj.t))
            for el in circuit.elements:
                sign = dict(el.membership).get(i + 1, 0)
                if sign == 0:
                    continue
                phi = waves[el.name].phi
                if el.kind is ElementKind.SOURCE:
                    balance -= sign * phi
                else:
                    balance += sign * phi
            assert np.max(np.abs(balance)) <= 1e-12

    def test_node_charge_balance_closes_exactly(self):
        circuit = parse((NETLIST_DIR / "node_dual.net").read_text())
        sys = build_node_system(circuit)
        traj = integrate(sys, np.array([0.4]), (0.0, 8.0),
                         t_eval=np.linspace(0.0, 8.0, 801))
        waves = branch_waveforms(circuit, traj)
        balance = np.zeros(len(traj.t))
        for el in circuit.elements:
            sign = dict(el.membership).get(1, 0)
            q = waves[el.name].q
            if el.kind is ElementKind.SOURCE:
                balance -= sign * q
            else:
                balance += sign * q
        assert np.max(np.abs(balance)) <= 1e-12

    def test_two_loop_first_row_golden(self):
        circuit, sys = two_loop_system()
        traj = integrate(sys, np.array([1.0, 0.0]), (0.0, 1.0),
                         v0=np.array([0.5, 0.0]))
        waves = branch_waveforms(circuit, traj)
        c3 = 0.3333333333  # cubic coefficient as written in the netlist
        assert traj.v[0, 1] == pytest.approx(4.0, abs=1e-12)
        assert traj.a[0, 1] == pytest.approx(-14.0, abs=1e-9)
        cm = waves["CM1"]
        assert cm.sigma[0] == pytest.approx(1.0, abs=1e-15)
        assert cm.q[0] == pytest.approx(-3.5, abs=1e-12)
        assert cm.phi[0] == pytest.approx(2.0, abs=1e-15)
        assert cm.V[0] == pytest.approx(-7.0, abs=1e-12)
        rm = waves["RM1"]
        phi_rm = 0.5 + 0.5 ** 3 * c3
        assert rm.phi[0] == pytest.approx(phi_rm, abs=1e-15)
        assert traj.a[0, 0] == pytest.approx(-(2.0 + phi_rm), abs=1e-12)
        r1 = waves["R1"]
        assert r1.phi[0] == pytest.approx(2.0, abs=1e-12)
        assert r1.V[0] == pytest.approx(0.5 * -14.0, abs=1e-9)

    def test_inductor_voltage_matches_grid_derivative_of_flux(self):
        sys = lc_system(L=2.0)
        circuit = parse("circuit lc formulation loop coords 1\n"
                        "element L1 L value=2.0 coords +1\n"
                        "element C1 C value=1.0 coords +1\n")
        tq = np.linspace(0.0, 2 * np.pi, 2001)
        traj = integrate(sys, np.array([1.0]), (0.0, 2 * np.pi),
                         rtol=1e-10, atol=1e-12, t_eval=tq)
        waves = branch_waveforms(circuit, traj)
        # x = cos(t/sqrt 2) scaled; check V_L equals -V_C on the loop
        v_l = waves["L1"].V
        v_c = waves["C1"].V
        assert np.max(np.abs(v_l + v_c)) <= 1e-6

    def test_record_lookup_and_iteration(self):
        circuit, sys = two_loop_system()
        traj = integrate(sys, np.array([0.5, 0.0]), (0.0, 1.0))
        waves = branch_waveforms(circuit, traj)
        assert [rec.name for rec in waves] == ["L1", "RM1", "CM1", "R1"]
        with pytest.raises(KeyError):
            waves["nope"]

    def test_coordinate_count_checked(self):
        circuit, _ = two_loop_system()
        sys = lc_system()
        traj = integrate(sys, np.array([1.0]), (0.0, 1.0))
        with pytest.raises(MemlagError):
            branch_waveforms(circuit, traj)


def sine(amp=1.0, omega=1.0, phase=0.0):
    return SourceWaveform(shape="sin", amplitude=amp, omega=omega,
                          phase=phase)


def memristor(curve=None, mod=Modulation.CHARGE):
    return Element(name="RM", kind=ElementKind.MEMRISTOR,
                   membership=((1, 1),),
                   curve=curve or ScalarCurve.poly(CUBIC), modulation=mod)


class TestDriveElement:
    def test_charge_driven_memristor_closed_form(self):
        tq = np.linspace(0.0, 2 * np.pi, 1001)
        waves = drive_element(memristor(), sine(), (0.0, 2 * np.pi),
                              t_eval=tq)
        rec = waves["RM"]
        q_exact = 1.0 - np.cos(tq)
        assert np.max(np.abs(rec.q - q_exact)) <= 1e-9
        assert np.max(np.abs(rec.I - np.sin(tq))) == 0.0
        assert np.max(np.abs(rec.V - (1 + rec.q ** 2) * rec.I)) <= 1e-12

    def test_flux_driven_memristor_uses_dual_pair(self):
        tq = np.linspace(0.0, 2 * np.pi, 1001)
        waves = drive_element(memristor(mod=Modulation.FLUX), sine(),
                              (0.0, 2 * np.pi), t_eval=tq)
        rec = waves["RM"]
        phi_exact = 1.0 - np.cos(tq)
        assert np.max(np.abs(rec.phi - phi_exact)) <= 1e-9
        assert np.max(np.abs(rec.q - (rec.phi + rec.phi ** 3 / 3))) <= 1e-8

    def test_two_level_memcapacitor_states(self):
        el = Element(name="CM", kind=ElementKind.MEMCAPACITOR,
                     membership=((1, 1),), curve=ScalarCurve.poly(CUBIC),
                     modulation=Modulation.INTEGRATED_CHARGE)
        tq = np.linspace(0.0, 2 * np.pi, 1001)
        waves = drive_element(el, sine(), (0.0, 2 * np.pi), t_eval=tq)
        rec = waves["CM"]
        assert np.max(np.abs(rec.q - (1.0 - np.cos(tq)))) <= 1e-9
        assert np.max(np.abs(rec.sigma - (tq - np.sin(tq)))) <= 1e-9
        assert np.max(np.abs(rec.V - (1 + rec.sigma ** 2) * rec.q)) <= 1e-11

    def test_linear_elements_reproduce_conventional_laws(self):
        tq = np.linspace(0.0, 2 * np.pi, 501)
        r = Element(name="R1", kind=ElementKind.RESISTOR,
                    membership=((1, 1),), value=2.0)
        rec = drive_element(r, sine(), (0.0, 2 * np.pi), t_eval=tq)["R1"]
        assert np.max(np.abs(rec.V - 2.0 * np.sin(tq))) == 0.0
        l = Element(name="L1", kind=ElementKind.INDUCTOR,
                    membership=((1, 1),), value=3.0)
        rec = drive_element(l, sine(), (0.0, 2 * np.pi), t_eval=tq)["L1"]
        assert np.max(np.abs(rec.phi - 3.0 * np.sin(tq))) == 0.0
        assert np.max(np.abs(rec.V - 3.0 * np.cos(tq))) == 0.0
        c = Element(name="C1", kind=ElementKind.CAPACITOR,
                    membership=((1, 1),), value=0.5)
        rec = drive_element(c, sine(), (0.0, 2 * np.pi), t_eval=tq)["C1"]
        assert np.max(np.abs(rec.q - 0.5 * np.sin(tq))) == 0.0
        assert np.max(np.abs(rec.sigma - 0.5 * (1 - np.cos(tq)))) <= 1e-9

    def test_linear_memristor_curve_degenerates_to_resistor(self):
        lin = memristor(curve=ScalarCurve.poly((0.0, 2.0)))
        tq = np.linspace(0.0, 2 * np.pi, 501)
        rec = drive_element(lin, sine(), (0.0, 2 * np.pi), t_eval=tq)["RM"]
        assert np.max(np.abs(rec.V - 2.0 * np.sin(tq))) <= 1e-9

    def test_sources_cannot_be_driven(self):
        src = Element(name="V1", kind=ElementKind.SOURCE,
                      membership=((1, 1),), waveform=sine(),
                      source_role="voltage")
        with pytest.raises(MemlagError):
            drive_element(src, sine(), (0.0, 1.0))

    def test_domain_exit_reports_the_element(self):
        el = memristor(curve=ScalarCurve.poly(CUBIC, domain=(-1.0, 1.0)))
        with pytest.raises(DomainExitError) as err:
            drive_element(el, sine(), (0.0, 2 * np.pi))
        assert err.value.element == "RM"


class TestPinch:
    def drive_and_check(self, element, state_field, u_field, y_field,
                        eps=1e-2):
        tq = np.linspace(0.0, 2 * np.pi, 4001)
        waves = drive_element(element, sine(), (0.0, 2 * np.pi), t_eval=tq)
        rec = waves[element.name]
        states = getattr(rec, state_field)
        bound = traversed_gain_bound(element, states)
        pair = (getattr(rec, u_field), getattr(rec, y_field))
        return pinch_check(pair, eps, gain_bound=bound), bound

    def test_memristor_is_pinched_with_open_lobes(self):
        rep, bound = self.drive_and_check(memristor(), "q", "I", "V")
        assert rep.verdict == "pinched"
        assert bound == pytest.approx(5.0, rel=1e-6)
        # closed-form lobe area of the (I, V) loop is 4/3 on each side
        assert rep.area_positive == pytest.approx(4.0 / 3.0, rel=1e-4)
        assert rep.area_negative == pytest.approx(4.0 / 3.0, rel=1e-4)
        assert abs(rep.area_positive - rep.area_negative) <= 1e-9

    def test_resistor_is_pinched_with_no_area(self):
        r = Element(name="R1", kind=ElementKind.RESISTOR,
                    membership=((1, 1),), value=2.0)
        rep, _ = self.drive_and_check(r, "q", "I", "V")
        assert rep.verdict == "pinched"
        assert rep.area_positive <= 1e-12
        assert rep.area_negative <= 1e-12

    def test_capacitor_is_not_pinched(self):
        c = Element(name="C1", kind=ElementKind.CAPACITOR,
                    membership=((1, 1),), value=1.0)
        rep, _ = self.drive_and_check(c, "sigma", "I", "q")
        assert rep.verdict == "not_pinched"
        assert rep.max_output_at_zero > 0.9

    def test_report_counts_zero_crossing_points(self):
        rep, _ = self.drive_and_check(memristor(), "q", "I", "V")
        assert rep.n_zero_points > 0
        assert rep.max_output_at_zero <= rep.gain_bound * rep.eps

    def test_scaling_both_series_preserves_the_verdict(self):
        tq = np.linspace(0.0, 2 * np.pi, 2001)
        rec = drive_element(memristor(), sine(), (0.0, 2 * np.pi),
                            t_eval=tq)["RM"]
        base = pinch_check((rec.I, rec.V), 1e-2, gain_bound=5.0)
        scaled = pinch_check((10 * rec.I, 10 * rec.V), 1e-1,
                             gain_bound=5.0)
        assert base.verdict == scaled.verdict == "pinched"
        assert scaled.area_positive == pytest.approx(
            100.0 * base.area_positive, rel=1e-12)

    def test_argument_validation(self):
        with pytest.raises(MemlagError):
            pinch_check((np.zeros(4), np.zeros(5)), 1e-2, gain_bound=1.0)
        with pytest.raises(MemlagError):
            pinch_check((np.zeros(4), np.zeros(4)), 0.0, gain_bound=1.0)
        with pytest.raises(MemlagError):
            pinch_check((np.zeros(4), np.zeros(4)), 1e-2, gain_bound=0.0)

    def test_gain_bound_uses_only_the_traversed_range(self):
        pwl = ScalarCurve.pwl(((-3.0, -4.4), (-1.0, -0.4), (1.0, 0.4),
                               (3.0, 4.4)))
        el = memristor(curve=pwl)
        inner = traversed_gain_bound(el, np.linspace(-0.9, 0.9, 50))
        outer = traversed_gain_bound(el, np.linspace(-2.5, 2.5, 50))
        assert inner == pytest.approx(0.4, abs=1e-12)
        assert outer == pytest.approx(2.0, abs=1e-12)

    def test_gain_bound_for_conventional_elements_is_the_value(self):
        r = Element(name="R1", kind=ElementKind.RESISTOR,
                    membership=((1, 1),), value=2.5)
        assert traversed_gain_bound(r, np.zeros(3)) == 2.5


class TestCsvOutput:
    def test_waveforms_csv_layout(self):
        circuit = parse((NETLIST_DIR / "ml_loop.net").read_text())
        sys = build_loop_system(circuit)
        traj = integrate(sys, np.array([0.5]), (0.0, 1.0),
                         t_eval=np.linspace(0.0, 1.0, 11))
        text = waveforms_csv(circuit, traj)
        lines = text.splitlines()
        assert lines[0].startswith("# units: t=s,sigma1=C*s")
        header = lines[1].split(",")
        assert header[:4] == ["t", "sigma1", "sigma1_dot", "sigma1_ddot"]
        assert "ML1_rho" in header
        assert "C1_V" in header
        assert len(lines) == 2 + 11
        assert text.endswith("\n")

    def test_node_csv_uses_flux_units(self):
        circuit = parse((NETLIST_DIR / "node_dual.net").read_text())
        sys = build_node_system(circuit)
        traj = integrate(sys, np.array([0.3]), (0.0, 1.0),
                         t_eval=np.linspace(0.0, 1.0, 5))
        text = waveforms_csv(circuit, traj)
        assert "rho1=Wb*s" in text.splitlines()[0]
        assert text.splitlines()[1].split(",")[1] == "rho1"

    def test_csv_bytes_are_deterministic(self):
        circuit = parse((NETLIST_DIR / "two_loop.net").read_text())
        sys = build_loop_system(circuit)

        def run():
            traj = integrate(sys, np.array([1.0, 0.0]), (0.0, 2.0),
                             v0=np.array([0.5, 0.0]),
                             t_eval=np.linspace(0.0, 2.0, 51))
            return waveforms_csv(circuit, traj)

        assert run() == run()

    def test_drive_csv_columns(self):
        tq = np.linspace(0.0, 1.0, 6)
        waves = drive_element(memristor(), sine(), (0.0, 1.0), t_eval=tq)
        lines = drive_csv(waves).splitlines()
        assert lines[1] == "t,RM_q,RM_I,RM_phi,RM_V"
        assert len(lines) == 2 + 6

    def test_17_digit_round_trip(self):
        tq = np.linspace(0.0, 1.0, 6)
        waves = drive_element(memristor(), sine(), (0.0, 1.0), t_eval=tq)
        lines = drive_csv(waves).splitlines()
        value = float(lines[2].split(",")[1])
        assert value == waves["RM"].q[0]
