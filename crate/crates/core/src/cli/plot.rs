//! Matplotlib scripts written next to the data.

pub fn map_script(csv: &str, title: &str, colorbar: &str) -> String {
    format!(
        r#"import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("{csv}", delimiter=",")
energy = data[0, 1:]
bias = data[1:, 0]
values = data[1:, 1:]

fig, ax = plt.subplots(figsize=(5, 4))
mesh = ax.pcolormesh((energy - energy.mean()) * 1e6, bias * 1e3, values, shading="auto", cmap="viridis")
ax.set_xlabel("laser energy - {{:.6f}} eV (ueV)".format(energy.mean()))
ax.set_ylabel("bias (mV)")
ax.set_title("{title}")
fig.colorbar(mesh, ax=ax, label="{colorbar}")
fig.tight_layout()
fig.savefig("{csv}".replace(".csv", ".png"), dpi=150)
plt.show()
"#
    )
}

pub fn transmission_script(csv: &str) -> String {
    format!(
        r#"import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("{csv}", delimiter=",", dtype=str)
detuning = data[0, 1:].astype(float)
transmission = data[1, 1:].astype(float)

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(detuning * 1e6, transmission, "-")
ax.set_xlabel("probe detuning (ueV)")
ax.set_ylabel("transmission")
ax.set_title("waveguide transmission")
fig.tight_layout()
fig.savefig("{csv}".replace(".csv", ".png"), dpi=150)
plt.show()
"#
    )
}

pub fn trace_script(csv: &str) -> String {
    format!(
        r#"import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("{csv}", delimiter=",", names=True)
fig, axes = plt.subplots(1, 2, figsize=(8, 3.5), sharey=True)
for ax, tag in zip(axes, ["blue_pump", "red_pump"]):
    for level in ["up", "down", "trion_up", "trion_down"]:
        ax.plot(data["time"] * 1e6, data[tag + "_" + level], label=level)
    ax.set_title(tag.replace("_", " "))
    ax.set_xlabel("time in cycle (us)")
axes[0].set_ylabel("population")
axes[0].legend()
fig.tight_layout()
fig.savefig("{csv}".replace(".csv", ".png"), dpi=150)
plt.show()
"#
    )
}

pub fn xy_fit_script(csv: &str, xlabel: &str, xscale: f64, ylabel: &str) -> String {
    format!(
        r#"import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("{csv}", delimiter=",", names=True)
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(data["x"] * {xscale}, data["y"], "o", ms=3, label="data")
if "model" in data.dtype.names:
    ax.plot(data["x"] * {xscale}, data["model"], "-", label="fit")
ax.set_xlabel("{xlabel}")
ax.set_ylabel("{ylabel}")
ax.legend()
fig.tight_layout()
fig.savefig("{csv}".replace(".csv", ".png"), dpi=150)
plt.show()
"#
    )
}

pub fn energy_script(csv: &str) -> String {
    format!(
        r#"import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt("{csv}", delimiter=",", names=True)
power = np.linspace(0, 2 * data["pump_power_w"], 50)
per_photon = power * data["pump_duration_s"] / data["photons_per_cycle"]
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(power * 1e9, per_photon * 1e15)
ax.plot(data["pump_power_w"] * 1e9, data["energy_per_photon_j"] * 1e15, "o")
ax.set_xlabel("pump power (nW)")
ax.set_ylabel("energy per switched photon (fJ)")
fig.tight_layout()
fig.savefig("{csv}".replace(".csv", ".png"), dpi=150)
plt.show()
"#
    )
}
