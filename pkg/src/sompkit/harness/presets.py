"""Figure presets.

Each preset fixes the simulation parameters of one published figure; the sweep
grids are chosen so that the theoretical boundary falls strictly inside the
swept range for the designed 100 x 200 matrix (mu about 0.077). Trials default to
1000; pass ``trials=10000`` for the full-size runs.

fig1 is a distribution check (empirical CDF of ||N||_2 against the Tracy-Widom
approximation), not a recovery sweep. Presets with two axes run in 2-D mode and
produce colormap output.
"""

from .config import ExperimentConfig, parse_grid

_BASE = dict(M=100, N=200, L=4, d=4, matrix="designed", matrix_seed=0, delta=1e-3)
# fine where the empirical transition sits, coarse out to the theory lines
_CMIN_GRID = parse_grid("0.1:2.0:0.1") + parse_grid("2.5:8.5:0.5")
_M_GRID = (20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120)

_PRESETS = {
    "fig1": dict(
        kind="norm-cdf", noise="gaussian", sigma=1.0, axis="d", grid=(2, 4, 6, 8, 10), trials=10000,
        notes=("empirical CDF of ||N||_2 for M=100, sigma=1 against the Tracy-Widom approximation",),
    ),
    "fig2": dict(
        noise="bounded", c_min=2.0, axis="epsilon", grid=parse_grid("0.05:1.0:0.05"),
        notes=("SRP versus epsilon, ||N||_2 pinned at epsilon",),
    ),
    "fig3": dict(
        noise="bounded", epsilon=1.0, axis="c_min", grid=parse_grid("0.25:10:0.25"),
        notes=("SRP versus C_min with ||N||_2 = 1; overlays the l2 and Frobenius thresholds",),
    ),
    "fig4": dict(
        noise="gaussian", c_min=2.0, axis="sigma", grid=parse_grid("0.005:0.1:0.005"),
        notes=("SRP versus sigma, Gaussian noise",),
    ),
    "fig5": dict(
        noise="gaussian", sigma=0.1, axis="c_min", grid=parse_grid("0.5:10:0.5"),
        notes=("SRP versus C_min, Gaussian noise with sigma^2 = 1/M",),
    ),
    "fig6": dict(
        noise="bounded", c_min=2.0, axis="L", grid=(1, 2, 3, 4, 5, 6),
        axis2="epsilon", grid2=parse_grid("0.1:4.0:0.1"),
        notes=("guaranteed noise level versus sparsity, bounded noise",),
    ),
    "fig7": dict(
        noise="gaussian", c_min=2.0, axis="L", grid=(1, 2, 3, 4, 5, 6),
        axis2="sigma", grid2=parse_grid("0.01:0.4:0.01"),
        notes=("guaranteed noise level versus sparsity, Gaussian noise",),
    ),
    "fig8": dict(
        noise="gaussian", sigma=0.1, axis="d", grid=(1, 2, 4, 8, 16, 32), algorithms=("somps",),
        axis2="c_min", grid2=_CMIN_GRID,
        notes=("SOMPS: required C_min versus d, sigma^2 = 1/M",),
    ),
    "fig9": dict(
        noise="gaussian", sigma=0.1, axis="d", grid=(1, 2, 4, 8, 16, 32), algorithms=("sompt",),
        axis2="c_min", grid2=_CMIN_GRID,
        notes=("SOMPT: required C_min versus d, sigma^2 = 1/M",),
    ),
    "fig10": dict(
        noise="gaussian", c_m=1.0, axis="sigma", grid=parse_grid("0.02:0.3:0.02"), algorithms=("somps",),
        axis2="d", grid2=(1, 2, 4, 8, 16, 32, 64),
        notes=("SOMPS: required d versus sigma with C_min^2 = d c_m, c_m = 1",),
    ),
    "fig11": dict(
        noise="gaussian", c_m=1.0, axis="sigma", grid=parse_grid("0.02:0.3:0.02"), algorithms=("sompt",),
        axis2="d", grid2=(1, 2, 4, 8, 16, 32, 64),
        notes=("SOMPT: required d versus sigma with C_min^2 = d c_m, c_m = 1",),
    ),
    "fig12": dict(
        noise="gaussian", sigma=0.1, c_min=10.0, axis="L", grid=(1, 2, 3, 4, 5, 6), algorithms=("somps",),
        axis2="M", grid2=_M_GRID,
        notes=("SOMPS: required M versus L, Gaussian noise sigma^2 = 0.01, C_min = 10",),
    ),
    "fig13": dict(
        noise="gaussian", sigma=0.1, c_m=1.0, axis="L", grid=(1, 2, 3, 4, 5, 6), algorithms=("sompt",),
        axis2="M", grid2=_M_GRID,
        notes=(
            "SOMPT: required M versus L, Gaussian noise sigma^2 = 0.01, C_min = sqrt(d)",
            "this caption's C_min = sqrt(d) differs from fig12's C_min = 10; both are kept as published",
        ),
    ),
    "fig12-bounded": dict(
        noise="bounded", epsilon=1.0, c_min=10.0, axis="L", grid=(1, 2, 3, 4, 5, 6),
        axis2="M", grid2=_M_GRID,
        notes=("required M versus L, ||N||_2 = 1, C_min = 10",),
    ),
    "fig14": dict(
        noise="gaussian", sigma=0.02, c_m=1.0, axis="d", grid=(1, 2, 4, 8, 16, 32),
        axis2="M", grid2=(10, 15, 20, 30, 40, 50, 60, 70, 80, 90, 100),
        notes=("required M versus d with C_min^2 = d c_m, c_m = 1, sigma = 0.02",),
    ),
    "fig15": dict(
        noise="bounded", signal="dynamic", c_max=4.0, c_min=4.0, axis="ratio", grid=parse_grid("0.1:1.0:0.1"),
        axis2="epsilon", grid2=parse_grid("0.1:2.0:0.1"),
        notes=("guaranteed noise level versus C_min/C_max, bounded noise, C_max = 4",),
    ),
    "fig16": dict(
        noise="gaussian", signal="dynamic", c_max=4.0, c_min=4.0, axis="ratio", grid=parse_grid("0.1:1.0:0.1"),
        axis2="sigma", grid2=parse_grid("0.01:0.2:0.01"),
        notes=("guaranteed noise level versus C_min/C_max, Gaussian noise, C_max = 4",),
    ),
}


def preset_names():
    return tuple(_PRESETS)


def figure_preset(name, **overrides):
    """ExperimentConfig for a named figure; keyword overrides replace preset fields."""
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; valid presets: {', '.join(_PRESETS)}")
    fields = dict(_BASE, name=name)
    fields.update(_PRESETS[name])
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**fields).validate()
