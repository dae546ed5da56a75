"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from wqed import CoordinatePair, SystemParams, TwoPhotonInput

finite = dict(allow_nan=False, allow_infinity=False)


def _snap(value: float) -> float:
    # Magnitudes like 1e-200 only probe floating-point underflow, not physics.
    return 0.0 if abs(value) < 1e-6 else value


def _signed(low, high):
    return st.floats(low, high, **finite).map(_snap)


losses = st.floats(0.05, 10.0, **finite)
couplings = st.floats(0.05, 200.0, **finite)
interactions = _signed(0.0, 20.0)
detunings = _signed(-5.0, 5.0)
positions = _signed(-20.0, 20.0)


@st.composite
def systems(draw, u=interactions):
    return SystemParams(gamma=draw(couplings), kappa=draw(losses), u=draw(u))


@st.composite
def pairs(draw):
    return TwoPhotonInput(delta1=draw(detunings), delta_a=draw(detunings), omega=draw(detunings))


@st.composite
def coordinates(draw):
    return CoordinatePair(draw(positions), draw(positions))
