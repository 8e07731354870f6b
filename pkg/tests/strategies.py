"""Hypothesis strategies shared by the test modules."""

import math

from hypothesis import assume
from hypothesis import strategies as st

from curvtrack.manifold import Kind, ManifoldSpec, bloch_norm

amplitude = st.floats(0.2, 3.0)
offset = st.floats(-4.0, 4.0)
angle = st.floats(0.0, 2 * math.pi)
kinds = st.sampled_from(list(Kind))


@st.composite
def specs(draw, kind=None):
    k = draw(kinds) if kind is None else kind
    return ManifoldSpec(k, draw(amplitude), draw(offset), draw(amplitude))


@st.composite
def gapped_points(draw, min_gap=0.2):
    spec = draw(specs())
    theta = draw(st.floats(0.0, spec.theta_range))
    phi = draw(angle)
    assume(float(bloch_norm(spec, theta)) >= min_gap)
    return spec, theta, phi


vectors = st.tuples(*[st.floats(-5.0, 5.0)] * 3)
