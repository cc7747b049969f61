"""Pinched hysteresis: the experimental signature of memory elements.

Driving a memory element with a sinusoid traces a loop in its input-output
plane.  For a genuine memory element the loop always passes through the
origin (output zero whenever input is zero) while enclosing area in both
half-planes: the pinched hysteresis figure.  A conventional capacitor
plotted in the same current-charge plane draws an unpinched ellipse, and a
plain resistor collapses to a line with no area.
"""

from pathlib import Path

import numpy as np

from memlag import (
    Element,
    ElementKind,
    Modulation,
    ScalarCurve,
    SourceWaveform,
    drive_element,
    pinch_check,
    traversed_gain_bound,
)

HERE = Path(__file__).resolve().parent

CUBIC = ScalarCurve.poly((0.0, 1.0, 0.0, 1.0 / 3.0))
drive = SourceWaveform(shape="sin", amplitude=1.0, omega=1.0)
t_eval = np.linspace(0.0, 2 * np.pi, 4001)

devices = [
    (Element(name="RM", kind=ElementKind.MEMRISTOR, membership=((1, 1),),
             curve=CUBIC, modulation=Modulation.CHARGE), "I", "V", "q"),
    (Element(name="ML", kind=ElementKind.MEMINDUCTOR, membership=((1, 1),),
             curve=CUBIC, modulation=Modulation.CHARGE), "I", "phi", "q"),
    (Element(name="C1", kind=ElementKind.CAPACITOR, membership=((1, 1),),
             value=1.0), "I", "q", "sigma"),
    (Element(name="R1", kind=ElementKind.RESISTOR, membership=((1, 1),),
             value=2.0), "I", "V", "q"),
]

curves = []
for element, u_name, y_name, state_name in devices:
    waves = drive_element(element, drive, (0.0, 2 * np.pi), t_eval=t_eval)
    rec = waves[element.name]
    u = getattr(rec, u_name)
    y = getattr(rec, y_name)
    bound = traversed_gain_bound(element, getattr(rec, state_name))
    report = pinch_check((u, y), 1e-2, gain_bound=bound)
    kind = element.kind.name.lower()
    print(f"{kind} in the ({u_name}, {y_name}) plane: {report.verdict}")
    print(f"  loop areas: u>0 half {report.area_positive:.4f}, "
          f"u<0 half {report.area_negative:.4f}")
    print(f"  worst |{y_name}| where |{u_name}| <= {report.eps}: "
          f"{report.max_output_at_zero:.4f} "
          f"(bound {report.gain_bound * report.eps:.4f})")
    curves.append((kind, u_name, y_name, u, y, report.verdict))

print("\nmemristor and meminductor pinch with open lobes; the capacitor")
print("fails the origin test; the resistor pinches trivially (zero area).")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the plot")
else:
    fig, axes = plt.subplots(2, 2, figsize=(8, 7))
    for ax, (kind, u_name, y_name, u, y, verdict) in zip(axes.flat, curves):
        ax.plot(u, y, lw=1.0)
        ax.axhline(0.0, color="gray", lw=0.5)
        ax.axvline(0.0, color="gray", lw=0.5)
        ax.set_title(f"{kind}: {verdict}")
        ax.set_xlabel(u_name)
        ax.set_ylabel(y_name)
    fig.tight_layout()
    out_dir = HERE / "output"
    out_dir.mkdir(exist_ok=True)
    png_path = out_dir / "hysteresis.png"
    fig.savefig(png_path, dpi=120)
    print(f"plot written to {png_path.relative_to(HERE)}")
