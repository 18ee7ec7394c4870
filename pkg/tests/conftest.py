import numpy as np
import pytest
from hypothesis import strategies as st

from arxid.ltisys import RationalTF, SystemSpec
from arxid.polyq import Poly


@pytest.fixture
def unstable_spec():
    """Unit feedback around a plant with anti-stable poles at 1 +- i."""
    return SystemSpec(
        L=Poly([0.0, 1.0, -1.7]),
        Gamma=Poly([1.0]),
        F=Poly([1.0, -2.0, 2.0]),
        C=Poly([1.0, 0.2]),
        D=Poly([1.0, -0.9]),
        K=RationalTF.constant(1.0),
        lambda_e=1.0,
        lambda_r=1.0,
    )


@pytest.fixture
def stable_spec():
    """Same noise model, stable plant, open loop."""
    return SystemSpec(
        L=Poly([0.0, 1.0, -1.7]),
        Gamma=Poly([1.0]),
        F=Poly([1.0, -0.5]),
        C=Poly([1.0, 0.2]),
        D=Poly([1.0, -0.9]),
        K=RationalTF.constant(0.0),
        lambda_e=1.0,
        lambda_r=1.0,
    )


# ---------------------------------------------------------------------------
# hypothesis strategies for well-conditioned root sets


def real_roots(min_mod, max_mod, max_count=3):
    root = st.one_of(
        st.floats(min_mod, max_mod),
        st.floats(-max_mod, -min_mod),
    )
    return st.lists(root, min_size=0, max_size=max_count)


def conjugate_pairs(min_mod, max_mod, max_count=2):
    pair = st.tuples(
        st.floats(min_mod, max_mod),
        st.floats(0.05, np.pi - 0.05),
    )
    return st.lists(pair, min_size=0, max_size=max_count)


def assemble_roots(reals, pairs):
    out = list(reals)
    for mod, angle in pairs:
        p = mod * np.exp(1j * angle)
        out += [p, np.conj(p)]
    return out


@st.composite
def stable_root_sets(draw, max_reals=3, max_pairs=2, min_size=0):
    roots = assemble_roots(
        draw(real_roots(0.05, 0.9, max_reals)),
        draw(conjugate_pairs(0.05, 0.9, max_pairs)),
    )
    if len(roots) < min_size:
        roots.append(draw(st.floats(0.1, 0.9)))
    return roots


@st.composite
def antistable_root_sets(draw, max_reals=3, max_pairs=2, min_size=1):
    # moduli capped at 2.5 to keep the expanded coefficients well conditioned
    roots = assemble_roots(
        draw(real_roots(1.1, 2.5, max_reals)),
        draw(conjugate_pairs(1.1, 2.5, max_pairs)),
    )
    if len(roots) < min_size:
        roots.append(draw(st.floats(1.1, 2.5)))
    return roots


@st.composite
def mixed_root_sets(draw):
    return draw(stable_root_sets()) + draw(antistable_root_sets(min_size=0))
