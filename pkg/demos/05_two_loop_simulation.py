"""Simulating the two-loop memcapacitor circuit end to end.

Loop 1 holds an inductor and a charge-modulated memristor; a linear
memcapacitor couples it to loop 2, which closes through a resistor.  Loop
2 has no inertia, so the reduction solves an algebraic row for its
velocity at every evaluation (a semi-explicit system).  The run checks
conservation along the way: the integrated Kirchhoff residual stays at
round-off, and the stored energy decays monotonically through the two
dissipative elements.
"""

from pathlib import Path

import numpy as np

from memlag import (
    branch_waveforms,
    build_loop_system,
    ikvl_residual,
    integrate,
    parse,
    waveforms_csv,
)

HERE = Path(__file__).resolve().parent

circuit = parse((HERE / "netlists" / "two_loop.net").read_text())
system = build_loop_system(circuit)

x0 = np.array([1.0, 0.0])   # integrated loop charges
v0 = np.array([0.5, 0.0])   # loop charges; loop 2's value is algebraic
traj = integrate(system, x0, (0.0, 20.0), v0=v0,
                 t_eval=np.linspace(0.0, 20.0, 2001))

print(f"integrated over [0, 20] in {traj.n_steps} accepted steps "
      f"({traj.n_rejected} rejected)")
print(f"ikvl residual along the trajectory: {ikvl_residual(system, traj):.3e}")

energy = np.array([system.energy(traj.x[k], traj.v[k])
                   for k in range(len(traj.t))])
print(f"stored energy: {energy[0]:.6f} -> {energy[-1]:.3e}")
print(f"largest energy increase between grid points: "
      f"{max(np.max(np.diff(energy)), 0.0):.3e}")

waves = branch_waveforms(circuit, traj)
rm = waves["RM1"]
print(f"\nmemristor charge range: [{rm.q.min():.3f}, {rm.q.max():.3f}]")
print(f"memristor voltage range: [{rm.V.min():.3f}, {rm.V.max():.3f}]")

out_dir = HERE / "output"
out_dir.mkdir(exist_ok=True)
csv_path = out_dir / "two_loop_run.csv"
csv_path.write_text(waveforms_csv(circuit, traj, waves))
print(f"\nfull waveform table written to {csv_path.relative_to(HERE)}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the plot")
else:
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].plot(traj.t, traj.x[:, 0], label="sigma 1")
    axes[0].plot(traj.t, traj.x[:, 1], label="sigma 2")
    axes[0].set_ylabel("integrated charge [C s]")
    axes[0].legend()
    axes[1].semilogy(traj.t, np.maximum(energy, 1e-30))
    axes[1].set_ylabel("stored energy [J]")
    axes[1].set_xlabel("t [s]")
    fig.tight_layout()
    png_path = out_dir / "two_loop_run.png"
    fig.savefig(png_path, dpi=120)
    print(f"plot written to {png_path.relative_to(HERE)}")
