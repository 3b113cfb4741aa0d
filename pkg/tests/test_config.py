import os

import pytest

from mixedcz.config import ConfigError, load_law, load_problem, parse_law, parse_problem
from mixedcz.laminate import Scheme
from mixedcz.laws1d import Intrinsic, PprIntrinsic
from mixedcz.mixedmode import PotentialLaw, TensionLaw
from mixedcz.pathsim import case_density

CASE1 = """
[law]
model = both
energies = 2.0, 2.0

[psi1]
kind = ppr_intrinsic
alpha = 2
sigma = 2
lambda = 0.2

[psi2]
kind = ppr_intrinsic
alpha = 2
sigma = 2
lambda = 0.2
"""


def test_case1_file_builds_reference_density(laws_dir):
    cfg = load_law(os.path.join(laws_dir, "case1.law"))
    assert cfg.density() == case_density(1)
    kinds = [type(l) for l in cfg.laws()]
    assert kinds == [PotentialLaw, TensionLaw]


def test_energy_defaults_to_direction_energy(laws_dir):
    cfg = load_law(os.path.join(laws_dir, "case3_potential.law"))
    psi = cfg.density()
    assert psi == case_density(3)
    assert psi.psi1 == PprIntrinsic(2, 2, 0.2, 6.0)


def test_round_trip():
    cfg = parse_law(CASE1)
    again = parse_law(cfg.to_ini())
    assert again == cfg and again.density() == cfg.density()


def test_intrinsic_base(laws_dir):
    psi = load_law(os.path.join(laws_dir, "uncoupled.law")).density()
    assert isinstance(psi.psi2, Intrinsic) and psi.psi2.eps == 0.5
    assert psi.F.alpha == 0.0


@pytest.mark.parametrize(
    "edit,line,needle",
    [
        (("lambda = 0.2\n\n[psi2]", "lambda = 0.2\ncolor = red\n\n[psi2]"), 11, "unknown key 'color'"),
        (("model = both", "model = sideways"), 3, "model must be"),
        (("energies = 2.0, 2.0", "energies = 2.0"), 4, "needs 2 values"),
        (("[psi2]", "[psi3]"), 12, "unknown section"),
        (("alpha = 2\n", "alpha = two\n"), 8, "must be a number"),
        (("kind = ppr_intrinsic", "kind = bilinear"), 7, "unknown kind"),
    ],
)
def test_errors_report_line(edit, line, needle):
    text = CASE1.replace(*edit, 1)
    with pytest.raises(ConfigError) as info:
        parse_law(text, "x.law")
    msg = str(info.value)
    assert needle in msg
    assert msg.startswith(f"x.law:{line}:")


def test_invalid_parameters():
    with pytest.raises(ConfigError):
        parse_law(CASE1.replace("lambda = 0.2", "lambda = 0.9", 1))


def test_problem_file(laws_dir):
    pc = load_problem(os.path.join(laws_dir, "stretch.problem"))
    p = pc.problem
    assert p.mesh.n_elements == 128
    assert p.scheme is Scheme.ENERGETIC and p.tau == 0.05
    assert len(p.times()) == 21
    assert isinstance(p.law, PotentialLaw)


def test_problem_rejects_tension_law_for_energetic(laws_dir):
    text = open(os.path.join(laws_dir, "stretch.problem")).read()
    law = open(os.path.join(laws_dir, "case3_nonpotential.law")).read()
    with pytest.raises(ConfigError):
        parse_problem(text, "p.problem", law_text=law)


def test_problem_bad_program(laws_dir):
    text = open(os.path.join(laws_dir, "stretch.problem")).read().replace("1.0  0 0 2.0 0 0 0", "1.0  0 0 2.0")
    with pytest.raises(ConfigError, match="program rows"):
        parse_problem(text, os.path.join(laws_dir, "p.problem"))
