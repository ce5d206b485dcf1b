"""Named workloads for the CLI and the demos.

Each preset is the subcommand it belongs to plus a configuration dictionary.
``ci=True`` coarsens the delay grid to a step of 0.5 for the 2D scans.
"""

from __future__ import annotations

import copy

from .reporting import RunConfig

__all__ = ["PRESETS", "preset", "preset_command"]

_S1 = {"n_sites": 2, "s": "1", "J": 1.0, "D": 0.2, "K_a": 0.0, "K_c": 0.0}
_S52 = {"n_sites": 2, "s": "5/2", "J": 1.0, "D": 0.2, "K_a": 0.0012, "K_c": 0.0006}

PRESETS: dict[str, tuple[str, dict]] = {
    "fig2a": ("onedcs", {"model": _S1, "drive": {"pulses": [{"B0": 0.5}]}, "engine": {"name": "avqds"}}),
    "fig2b": ("onedcs", {"model": _S1, "drive": {"pulses": [{"B0": 3.0}]}, "engine": {"name": "avqds"}}),
    "fig3c": ("twodcs", {"model": _S1, "drive": {"pulses": [{"B0": 0.5}]}, "engine": {"name": "avqds"}}),
    "fig3d": ("twodcs", {"model": _S1, "drive": {"pulses": [{"B0": 3.0}]}, "engine": {"name": "avqds"}}),
    "fig6": ("onedcs", {"model": _S52, "drive": {"pulses": [{"B0": 4.5}]}, "engine": {"name": "avqds"}}),
    "fig8": (
        "twodcs",
        {
            "model": _S52,
            "drive": {"pulses": [{"B0": 4.0}]},
            "engine": {"name": "avqds"},
            "spectroscopy": {"slice_tau": 7.6},
        },
    ),
}

_CI_TAU = {"start": 3.5, "stop": 20.0, "step": 0.5}


def preset_command(name: str) -> str:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name][0]


def preset(name: str, ci: bool = False, **overrides) -> RunConfig:
    """Configuration for ``name``; keyword blocks are merged on top."""
    command = preset_command(name)
    data = copy.deepcopy(PRESETS[name][1])
    if ci and command == "twodcs":
        data.setdefault("drive", {})["tau"] = dict(_CI_TAU)
    cfg = RunConfig.from_dict(data)
    return cfg.with_overrides(**overrides) if overrides else cfg
