"""Named sweeps producing the data behind the published figures.

Every preset emits raw values. Where a figure rescales a curve for display
(the Gamma = 1 total-correlation curve is shown multiplied by 1e-3) the
rescaling is left to the plotting side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bosonic_ness.experiments.sweep import SweepSpec, run_sweep
from bosonic_ness.params import ChainParams


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    parts: tuple[SweepSpec, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return self.parts[0].columns


def geometric_L(L_min: int, L_max: int, num: int, parity: int | None = None) -> tuple[int, ...]:
    """Roughly log-spaced chain lengths, optionally all of one parity."""
    Ls = np.round(np.geomspace(L_min, L_max, num)).astype(int)
    if parity is not None:
        Ls = Ls + ((Ls - parity) % 2)
    return tuple(int(L) for L in np.unique(Ls))


def _base(L=10, N1=2.0, NL=1.0, **kw) -> ChainParams:
    return ChainParams.thermal(L, N1, NL, **kw)


def _symmetric_cmi_parts(Gammas, N1s, bs, L_for_b, measures=("cmi",)):
    # symmetric tripartitions need L - b even, so each b gets its own L list
    parts = []
    for b in bs:
        parts.append(SweepSpec(
            base=_base(),
            axes=(("N1", tuple(N1s)), ("Gamma", tuple(Gammas)), ("b", (b,)), ("L", L_for_b(b))),
            measures=measures, partition="symmetric"))
    return tuple(parts)


def _build() -> dict[str, Preset]:
    presets = [
        Preset("fig3a", "ballistic occupation profile, L=10, several lambda",
               (SweepSpec(_base(), (("lambda", (0.5, 1.0, 2.0)),), ("profile", "current")),)),
        Preset("fig3b", "diffusive occupation profile, L=10, lambda=1, several Gamma",
               (SweepSpec(_base(), (("Gamma", (0.0, 0.1, 0.5, 1.0)),), ("profile", "current")),)),
        Preset("fig5a", "half-chain mutual information vs L, several Gamma",
               (SweepSpec(_base(), (("Gamma", (0.0, 0.1, 1.0)), ("L", tuple(range(16, 129, 8)))),
                          ("mi",)),)),
        Preset("fig5b", "total correlations vs L, several Gamma",
               (SweepSpec(_base(), (("Gamma", (0.0, 0.1, 1.0)), ("L", tuple(range(16, 129, 8)))),
                          ("tc",)),)),
        Preset("fig6a", "CMI vs middle-block size b at L=40, several N1",
               (SweepSpec(_base(40), (("N1", (2.0, 5.0, 15.0)), ("Gamma", (0.0, 0.1)),
                                      ("b", tuple(range(2, 13, 2)))), ("cmi",)),)),
        Preset("fig6b", "CMI vs L at b=1",
               _symmetric_cmi_parts((0.0, 0.1), (15.0,), (1,),
                                    lambda b: geometric_L(20, 12800, 28, b))),
        Preset("fig6c", "CMI vs L for b=1,2,3 at Gamma=0.1, N1=15",
               _symmetric_cmi_parts((0.1,), (15.0,), (1, 2, 3),
                                    lambda b: geometric_L(20, 12800, 28, b))),
        Preset("fig6d", "finite-size collapse data, Gamma in {0.05,0.1,0.2}, L in 20..100",
               _symmetric_cmi_parts((0.05, 0.1, 0.2), (2.0, 15.0), (1, 2, 3),
                                    lambda b: tuple(L + (L - b) % 2 for L in range(20, 101, 10)))),
        Preset("kato", "largest single-site CMI and the local-equilibrium bound vs L",
               (SweepSpec(_base(), (("Gamma", (0.0, 0.1)), ("L", geometric_L(10, 6400, 15))),
                          ("kato",)),)),
    ]
    return {p.name: p for p in presets}


PRESETS = _build()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r} (choose from {', '.join(PRESETS)})") from None


def run_preset(name: str, workers: int | None = None) -> tuple[list[dict], tuple[str, ...]]:
    """Rows of every part of the preset, in order, and the shared column list."""
    preset = get_preset(name)
    rows: list[dict] = []
    for part in preset.parts:
        rows.extend(run_sweep(part, workers))
    return rows, preset.columns
