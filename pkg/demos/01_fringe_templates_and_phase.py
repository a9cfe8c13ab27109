"""Fringe templates and the three phase stages.

Generates the four phase-shifted sinusoidal templates a display would
show, demodulates the central row with the four-step arctangent, then
unwraps and smooths the result. With no lens in the loop the unwrapped
phase is an exact straight line, which is the baseline every
calibration measurement is judged against.

Writes demos/output/01_templates.png and 01_phase_stages.png.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from fringecal import four_step_phase, generate_template_set, smooth_cubic, unwrap_1d

OUT_DIR = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT_DIR, exist_ok=True)

WIDTH, HEIGHT, F0 = 512, 512, 0.0625

i1, i2, i3, i4 = generate_template_set(WIDTH, HEIGHT, F0)
print(f"four templates, {WIDTH}x{HEIGHT}, carrier {F0} cycles/px "
      f"(period {1 / F0:.0f} px)")

fig, axes = plt.subplots(1, 4, figsize=(12, 3.2))
for k, (ax, pattern) in enumerate(zip(axes, (i1, i2, i3, i4))):
    ax.imshow(pattern.data[:64], cmap="gray", vmin=0, vmax=255, aspect="auto")
    ax.set_title(f"shift {k} * pi/2")
    ax.set_xticks([]), ax.set_yticks([])
fig.suptitle("phase-shifted fringe templates (top 64 rows)")
fig.tight_layout()
fig.savefig(os.path.join(OUT_DIR, "01_templates.png"), dpi=120)

wrapped = four_step_phase(i1, i2, i3, i4, row=HEIGHT // 2)
unwrapped = unwrap_1d(wrapped)
smoothed = smooth_cubic(unwrapped)
x = np.arange(WIDTH)

fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
axes[0].plot(x, wrapped.values, lw=0.8)
axes[0].set_ylabel("wrapped (rad)")
axes[1].plot(x, unwrapped.values, lw=0.8)
axes[1].set_ylabel("unwrapped (rad)")
axes[2].plot(x, smoothed.values - unwrapped.values, lw=0.8)
axes[2].set_ylabel("smooth - raw (rad)")
axes[2].set_xlabel("column")
axes[0].set_title("phase recovery along the central row")
fig.tight_layout()
fig.savefig(os.path.join(OUT_DIR, "01_phase_stages.png"), dpi=120)

slope = np.polyfit(x, unwrapped.values, 1)[0]
print(f"unwrapped phase slope {slope:.6f} rad/px -> f0 estimate "
      f"{slope / (2 * np.pi):.6f} cycles/px")
print(f"wrote figures to {OUT_DIR}")
