"""Named scenario presets (fig2 .. fig21).

Each preset bundles one complete parameter set per panel/curve of the
corresponding figure-style scenario: lattice spin, cell size, temperature,
field vector, atom parameters, initial state, and a time grid that resolves
the fastest frequencies involved.  The CLI `recipe` subcommand renders them
to CSV; the tables double as the canonical regression scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: default grid: 0 .. 50/J with 1001 points resolves frequencies of a few J
T_MAX, N_POINTS = 50.0, 1001
#: entanglement grids need spacing <= 0.05/J for death-interval detection
N_POINTS_ENTANGLE = 2501

_DIAG = 0.5 / math.sqrt(3)  # (h, h, h) with norm J/2
_PLANE = 0.5 / math.sqrt(2)  # (h, h, 0) with norm J/2


@dataclass(frozen=True)
class RecipeEntry:
    """One runnable parameter set of a preset."""

    label: str
    task: str  # dephase | transition | entangle
    twice_s: int
    temperature: float
    hx: float = 0.0
    hy: float = 0.0
    hz: float = 0.0
    omega0: float = 2.0
    alpha: float = 0.0
    gamma: float = 0.0
    lam: float = 1.0
    initial: str = "plus"
    coupling_sum: float = 6.0
    eta: int = 8
    t_max: float = T_MAX
    n_points: int = N_POINTS


def _dephase(label, twice_s, temperature, omega0=2.0, **field):
    return RecipeEntry(label=label, task="dephase", twice_s=twice_s,
                       temperature=temperature, omega0=omega0, lam=1.0, **field)


def _transition(label, twice_s, temperature, omega0=2.0, initial="ground", **kw):
    return RecipeEntry(label=label, task="transition", twice_s=twice_s,
                       temperature=temperature, omega0=omega0,
                       alpha=1.0, gamma=1.0, lam=1.0, initial=initial, **kw)


def _entangle(label, twice_s, temperature, omega0=2.0, **field):
    return RecipeEntry(label=label, task="entangle", twice_s=twice_s,
                       temperature=temperature, omega0=omega0,
                       alpha=1.0, gamma=1.0, lam=1.0, initial="bell",
                       n_points=N_POINTS_ENTANGLE, **field)


RECIPES: dict = {
    # pure dephasing, spin-1/2 lattice
    "fig2": (_dephase("ab", 1, 2.0, hz=0.5), _dephase("cd", 1, 2.5, hz=0.5)),
    "fig3": (_dephase("ab", 1, 2.0, hx=0.5), _dephase("cd", 1, 2.0, hx=0.5, omega0=1.0)),
    "fig4": (_dephase("ab", 1, 2.0, hx=_DIAG, hy=_DIAG, hz=_DIAG),
             _dephase("cd", 1, 2.5, hx=_DIAG, hy=_DIAG, hz=_DIAG)),
    "fig5": (_dephase("ab", 1, 2.0, hx=_PLANE, hy=_PLANE),),
    # pure dephasing, spin-1 lattice
    "fig6": (_dephase("ab", 2, 7.0, hz=0.5), _dephase("cd", 2, 7.8, hz=0.5)),
    "fig7": (_dephase("ab", 2, 7.0, hx=0.5), _dephase("cd", 2, 7.0, hx=0.5, omega0=1.0)),
    # dephasing rate panels: one entry per (spin, temperature, field direction)
    "fig8": (_dephase("a_hz", 1, 2.0, hz=0.5), _dephase("a_hx", 1, 2.0, hx=0.5),
             _dephase("b_hz", 1, 2.5, hz=0.5), _dephase("b_hx", 1, 2.5, hx=0.5),
             _dephase("c_hz", 2, 7.0, hz=0.5), _dephase("c_hx", 2, 7.0, hx=0.5),
             _dephase("d_hz", 2, 7.8, hz=0.5), _dephase("d_hx", 2, 7.8, hx=0.5)),
    # level transitions from the ground state
    "fig9": (_transition("ab", 1, 2.0, hz=0.5),),
    "fig10": (_transition("ab", 1, 2.5, hz=0.5),),
    "fig11": (_transition("a", 2, 5.0, hz=0.5), _transition("b", 2, 7.0, hz=0.5)),
    "fig12": (_transition("abcd", 1, 2.0, hx=0.5),),
    "fig13": (_transition("abcd", 1, 2.0, hx=1.0),),
    "fig14": (_transition("abcd", 1, 2.5, hx=1.0),),
    # transitions from the equal superposition
    "fig15": (_transition("a", 1, 2.0, hz=0.5, initial="plus"),
              _transition("b", 1, 2.0, hx=0.5, initial="plus")),
    "fig16": (_transition("a", 1, 2.0, hy=0.5, initial="plus"),
              _transition("b", 1, 2.5, hy=0.5, initial="plus")),
    # degenerate levels, x-field, spin-1 lattice (long grid for averaging)
    "fig17": (_transition("a", 2, 5.0, hx=0.5, omega0=0.0, t_max=200.0, n_points=2001),
              _transition("b", 2, 7.0, hx=0.5, omega0=0.0, t_max=200.0, n_points=2001)),
    # two-atom concurrence
    "fig18": (_entangle("a", 1, 2.0, hz=0.5), _entangle("b", 1, 2.5, hz=0.5)),
    "fig19": (_entangle("a", 1, 2.0, hx=0.5), _entangle("b", 1, 2.5, hx=0.5)),
    "fig20": (_entangle("a", 2, 5.0, hz=0.5), _entangle("b", 2, 7.0, hz=0.5)),
    "fig21": (_entangle("a", 2, 7.0, hx=0.5, omega0=0.0),),
}


def recipe_names() -> list:
    return sorted(RECIPES, key=lambda name: int(name.removeprefix("fig")))


def get_recipe(name: str) -> tuple:
    try:
        return RECIPES[name]
    except KeyError:
        raise KeyError(f"unknown recipe {name!r}; available: {', '.join(recipe_names())}") from None
