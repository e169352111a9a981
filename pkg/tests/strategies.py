"""Hypothesis strategies for random band-structured level schemes."""

import numpy as np
from hypothesis import strategies as st

from echo2d.services.model import ExcitonSystem, set_rates


@st.composite
def band_systems(draw) -> ExcitonSystem:
    """Ground level, 1-3 single excitations and 0-2 double excitations."""
    n_single = draw(st.integers(min_value=1, max_value=3))
    n_double = draw(st.integers(min_value=0, max_value=2))
    band = (0,) + (1,) * n_single + (2,) * n_double
    n = len(band)
    energies = [0.0]
    energies += draw(
        st.lists(st.floats(1.0, 3.0), min_size=n_single, max_size=n_single)
    )
    energies += draw(
        st.lists(st.floats(3.0, 6.0), min_size=n_double, max_size=n_double)
    )
    dipole = st.one_of(st.just(0.0), st.floats(0.1, 2.0), st.floats(-2.0, -0.1))
    mu = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            if band[a] == band[b] + 1:
                mu[a, b] = draw(dipole)
    return ExcitonSystem(energies=np.array(energies), band=band, mu_plus=mu)


@st.composite
def broadened_band_systems(draw) -> ExcitonSystem:
    """A band system with random per-level widths, populations frozen or not."""
    system = draw(band_systems())
    gamma = draw(
        st.lists(
            st.floats(0.0, 0.05),
            min_size=system.n_levels,
            max_size=system.n_levels,
        )
    )
    return set_rates(system, gamma, population_relaxation=draw(st.booleans()))
