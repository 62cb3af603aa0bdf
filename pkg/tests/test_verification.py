import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import PARAMS, random_family
from lfwave.mra import MRAFamily, Mask
from lfwave.spectral import SpectralStepFunction
from lfwave.trees import build_basic_tree
from lfwave.verification import verify_family, verify_system
from lfwave.wavelets import build_system

FAMILY_CHECKS = {
    "mask", "tree_support", "scaling_product", "refinement", "duality", "support_elementary",
    "riesz", "character_orthonormality", "spatial_refinement", "fourier",
}


def names(rep, failing_only=False):
    return {c.name for c in rep.checks if not failing_only or not c.passed}


def test_chain_family_report(chain_family):
    rep = verify_family(chain_family)
    assert rep.passed and names(rep) == FAMILY_CHECKS
    riesz = next(c for c in rep.checks if c.name == "riesz").witness
    assert riesz["bounds"] == pytest.approx([0.64, 1.0])
    assert riesz["gram_eigen_range"][0] == pytest.approx(0.64, abs=1e-9)
    assert "eigvalsh" in riesz["eigen_method"]
    assert riesz["periodization_range"] == pytest.approx([0.64, 1.0])


def test_chain_system_report(chain_system):
    rep = verify_system(chain_system, depth=3)
    assert rep.passed, rep.failing()
    assert {"wavelet_data", "matrix_condition", "biorthogonality_wavelets"} <= names(rep)
    js = rep.to_json()
    assert js["passed"] is True and len(js["checks"]) == len(rep.checks)


def test_tampered_phi(chain_family):
    vals = dict(chain_family.phi_hat.values)
    k = next(a for a in vals if a.digits)
    vals[k] += 1e-3
    bad = MRAFamily(chain_family.mask, chain_family.dual, SpectralStepFunction(2, 1, 2, vals),
                    chain_family.dual_phi_hat, chain_family.H, chain_family.tree)
    failing = names(verify_family(bad), failing_only=True)
    assert {"scaling_product", "refinement", "duality", "spatial_refinement"} <= failing


def test_wrong_tree(chain_family):
    bad = MRAFamily(chain_family.mask, chain_family.dual, chain_family.phi_hat,
                    chain_family.dual_phi_hat, chain_family.H, build_basic_tree(2, 1, 2))
    assert names(verify_family(bad), failing_only=True) == {"tree_support", "scaling_product"}


def test_wrong_dual(chain_family):
    d = chain_family.dual
    ident = next(a for a in d.values.values if not a.digits)
    vals = {a: (v if a == ident else v * 1.02) for a, v in d.values.values.items()}
    dual = Mask(SpectralStepFunction(2, 1, 2, vals), d.A, d.B, d.N)
    bad = MRAFamily(chain_family.mask, dual, chain_family.phi_hat, chain_family.dual_phi_hat,
                    chain_family.H, chain_family.tree)
    failing = names(verify_family(bad), failing_only=True)
    assert {"mask", "scaling_product"} <= failing


def test_tampered_wavelet_data(chain_system):
    psi = dict(chain_system.psi_hat)
    psi[(1,)] = psi[(1,)].scale(1.001)
    bad = type(chain_system)(chain_system.family, chain_system.masks, chain_system.dual_masks, psi,
                             chain_system.dual_psi_hat)
    assert "wavelet_data" in names(verify_system(bad), failing_only=True)


def test_treeless_family_skips_link(chain_family):
    fam = MRAFamily(chain_family.mask, chain_family.dual, chain_family.phi_hat,
                    chain_family.dual_phi_hat, chain_family.H, None)
    rep = verify_family(fam)
    link = next(c for c in rep.checks if c.name == "tree_support")
    assert link.skipped and rep.passed


@given(st.sampled_from(PARAMS), st.integers(0, 10 ** 6), st.integers(0, 6))
@settings(max_examples=6)
def test_random_systems_verify(params, seed, steps):
    system = build_system(random_family(*params, steps, seed))
    rep = verify_system(system)
    assert rep.passed, rep.failing()

