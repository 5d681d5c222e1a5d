import pytest

from supnil.chart import BundleSpec
from supnil.deformation import DeformedModel, chart0_fields, lift_fields, pure_field_list
from supnil.derivations import SuperDerivation, derivation_from_generator_action
from supnil.expr import parse_derivation
from supnil.grassmann import SuperFunction

PAPER_NAMES = ["theta1", "theta2", "theta3", "eta1", "eta2", "eta3", "eta4"]
PAPER_TWISTS = [4, 4, 4, -2, -2, -2, -2]
DEFORMATION_TEXT = "(z^-2*eta1 + z^-8*eta2)*eta3*eta4*d(theta1)"


@pytest.fixture(scope="session")
def names():
    return PAPER_NAMES


@pytest.fixture(scope="session")
def spec():
    return BundleSpec.from_pairs(list(zip(PAPER_NAMES, PAPER_TWISTS)))


@pytest.fixture(scope="session")
def y01(names):
    return parse_derivation(DEFORMATION_TEXT, names)


@pytest.fixture(scope="session")
def model(spec, y01):
    return DeformedModel(spec, y01)


@pytest.fixture(scope="session")
def split_model(spec):
    return DeformedModel(spec, SuperDerivation.zero())


@pytest.fixture(scope="session")
def lift_pairs(model):
    return lift_fields(model)


@pytest.fixture(scope="session")
def fields(lift_pairs):
    return [p.x0 for p in lift_pairs]


@pytest.fixture(scope="session")
def split_fields(split_model):
    return chart0_fields(split_model)


@pytest.fixture(scope="session")
def lemma_deg2(model):
    return pure_field_list(model, 2)


@pytest.fixture(scope="session")
def lemma_deg4(model):
    return pure_field_list(model, 4)


@pytest.fixture(scope="session")
def lemma_deg6(model):
    return pure_field_list(model, 6)


def operator_bracket(x, y, n_gen):
    """Independent bracket oracle: operator commutator rebuilt from the
    action on the chart generators."""
    out = SuperDerivation.zero()
    for px in (0, 1):
        xs = x.parity_piece(px)
        if not xs:
            continue
        for py in (0, 1):
            ys = y.parity_piece(py)
            if not ys:
                continue
            gens = [SuperFunction.base_var()] + [
                SuperFunction.generator(i) for i in range(n_gen)
            ]
            images = []
            for g in gens:
                img = xs.apply(ys.apply(g))
                if px and py:
                    img = img + ys.apply(xs.apply(g))
                else:
                    img = img - ys.apply(xs.apply(g))
                images.append(img)
            out = out + derivation_from_generator_action(
                images[0], {i: images[i + 1] for i in range(n_gen)}
            )
    return out


def theta_mask(*idx):
    return sum(1 << (i - 1) for i in idx)


def eta_mask(*idx):
    return sum(1 << (i + 2) for i in idx)
