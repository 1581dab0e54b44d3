import math

import numpy as np
import pytest

from sector_lab.equivalence_lab import ModelSpec, build_model
from sector_lab.errors import (
    ContourNotConverged,
    IllConditionedEigenbasis,
    NotSectorial,
    SpectrumHit,
    SpectrumNotCovered,
)
from sector_lab.function_space import ScalarFunction, hinf0_presets, imag_power, make_partition
from sector_lab.functional_calculus import (
    SectorialOperator,
    contour_calculus,
    imaginary_power,
    imaginary_power_apply,
    paley_littlewood_family,
    resolvent,
    semigroup,
    spectral_calculus,
)
from sector_lab.linalg_core import ModelSpace, hermitian_eig


def tridiag(m):
    return 2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


A8 = SectorialOperator.from_matrix(tridiag(8))

SHIPPED = [
    {"kind": "laplacian1d", "m": 8, "p": 2},
    {"kind": "laplacian1d", "m": 16, "p": 1.5},
    {"kind": "laplacian2d", "m": 3, "p": 3},
    {"kind": "diagonal", "p": 2, "parameters": {"eigenvalues": [0.5, 1.0, 2.0, 4.0]}},
    {"kind": "weighted_translation", "m": 41, "p": 2, "parameters": {"alpha": 1.0, "L": 10.0}},
]


@pytest.fixture(scope="module", params=SHIPPED, ids=lambda d: f"{d['kind']}-{d.get('m', 'x')}")
def model(request):
    return build_model(ModelSpec.from_dict(request.param))[0]


def fn(func, sector=math.pi, decay=1.0, label="f"):
    return ScalarFunction(func=lambda z: func(np.asarray(z, dtype=complex)), max_order=0, label=label,
                          holomorphic=True, sector=sector, decay=decay)


F_TEST = fn(lambda z: z / (1 + z) ** 2)
G_TEST = fn(lambda z: np.sqrt(z) / (1 + z), decay=0.5)


class TestSectorialOperator:
    def test_certificate_on_shipped_models(self, model):
        assert math.isfinite(model.sectoriality_constant) and model.sectoriality_constant >= 1.0

    def test_rejects_nonpositive(self):
        with pytest.raises(NotSectorial):
            SectorialOperator.from_matrix(np.diag([1.0, -1.0]))
        with pytest.raises(NotSectorial):
            SectorialOperator.from_matrix(np.zeros((2, 2)))

    def test_nonnormal_matrix(self):
        a = np.array([[1.0, 0.5], [0.0, 2.0]])
        op = SectorialOperator.from_matrix(a)
        assert not op.self_adjoint and op.spectral_cache is None
        np.testing.assert_allclose(np.sort(op.spectrum.real), [1, 2])

    def test_frozen(self):
        with pytest.raises(AttributeError):
            A8.sector_angle = 0.5

    def test_spectral_cache_supplied(self):
        dec = hermitian_eig(tridiag(4))
        op = SectorialOperator.from_matrix(tridiag(4), spectral_cache=dec)
        np.testing.assert_array_equal(op.spectral_cache.eigenvalues, dec.eigenvalues)
        bad = type(dec)(dec.eigenvalues + 1.0, dec.eigenvectors)
        with pytest.raises(NotSectorial):
            SectorialOperator.from_matrix(tridiag(4), spectral_cache=bad)


class TestResolvent:
    def test_scalar(self):
        np.testing.assert_allclose(resolvent(SectorialOperator.from_matrix([[1.0]]), 2.0), [[1.0]])

    def test_diagonal(self):
        r = resolvent(SectorialOperator.from_matrix(np.diag([1.0, 4.0])), 1j)
        np.testing.assert_allclose(r, np.diag([1 / (1j - 1), 1 / (1j - 4)]), rtol=1e-14)

    def test_resolvent_identity(self, model):
        lam, mu = 2j, -1.0
        r1, r2 = resolvent(model, lam), resolvent(model, mu)
        assert np.linalg.norm(r1 - r2 - (mu - lam) * r1 @ r2) <= 1e-9 * max(np.linalg.norm(r1), 1.0)

    def test_defining_residual(self):
        lam = 0.5 + 0.5j
        r = resolvent(A8, lam)
        assert np.linalg.norm((lam * np.eye(8) - A8.matrix) @ r - np.eye(8)) <= 1e-10

    def test_spectrum_hit(self):
        with pytest.raises(SpectrumHit):
            resolvent(SectorialOperator.from_matrix(np.diag([1.0, 2.0])), 2.0)


class TestSemigroup:
    def test_scalar(self):
        assert semigroup(SectorialOperator.from_matrix([[1.0]]), 1.0)[0, 0] == pytest.approx(math.exp(-1))

    def test_semigroup_law(self, model):
        z1, z2 = 0.3, 0.7 + 0.2j
        lhs = semigroup(model, z1) @ semigroup(model, z2)
        assert rel(lhs, semigroup(model, z1 + z2)) <= 1e-9

    def test_paths_agree(self):
        z = 0.4 + 0.3j
        assert rel(semigroup(A8, z, method="taylor"), semigroup(A8, z, method="spectral")) <= 1e-9

    def test_norm_spectral_mapping(self):
        lmin = hermitian_eig(tridiag(8)).eigenvalues[0]
        for t in (0.1, 1.0, 3.0):
            assert np.linalg.norm(semigroup(A8, t), 2) == pytest.approx(math.exp(-t * lmin), rel=1e-10)

    def test_imaginary_boundary_is_unitary(self):
        u = semigroup(A8, 2.0j)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-12)


class TestImaginaryPowers:
    def test_scalar(self):
        v = imaginary_power(SectorialOperator.from_matrix([[4.0]]), 0.7)[0, 0]
        assert v == pytest.approx(np.exp(0.7j * math.log(4)))
        assert abs(v) == pytest.approx(1.0)

    def test_group_law(self, model):
        s, t = 0.4, -1.3
        lhs = imaginary_power(model, s) @ imaginary_power(model, t)
        assert rel(lhs, imaginary_power(model, s + t)) <= 1e-9

    def test_unitary_on_l2(self):
        x = np.random.default_rng(0).standard_normal(8)
        for t in (-3.0, 0.5, 10.0):
            assert np.linalg.norm(imaginary_power(A8, t) @ x) == pytest.approx(np.linalg.norm(x), rel=1e-10)

    def test_apply_matches_matrix(self):
        x = np.arange(8.0)
        rows = imaginary_power_apply(A8, [0.0, 1.5], x)
        np.testing.assert_allclose(rows[1], imaginary_power(A8, 1.5) @ x, atol=1e-12)
        np.testing.assert_allclose(rows[0], x, atol=1e-12)

    def test_ill_conditioned(self):
        eps = 1e-9
        a = np.array([[1.0, 1.0], [0.0, 1.0 + eps]])
        with pytest.raises(IllConditionedEigenbasis):
            imaginary_power(SectorialOperator.from_matrix(a), 1.0)


class TestContourCalculus:
    def test_scalar(self):
        out = contour_calculus(SectorialOperator.from_matrix([[1.0]]), F_TEST)
        assert out[0, 0] == pytest.approx(0.25, rel=1e-10)

    @pytest.mark.parametrize("m", [8, 16, 32])
    def test_presets_match_spectral(self, m):
        op = SectorialOperator.from_matrix(tridiag(m))
        for f in hinf0_presets().values():
            assert rel(contour_calculus(op, f), spectral_calculus(op, f)) <= 1e-8

    def test_multiplicative(self):
        fg = fn(lambda z: z / (1 + z) ** 2 * np.sqrt(z) / (1 + z), decay=1.5)
        lhs = contour_calculus(A8, F_TEST) @ contour_calculus(A8, G_TEST)
        assert rel(lhs, contour_calculus(A8, fg)) <= 1e-8

    def test_angle_independence(self):
        a = contour_calculus(A8, F_TEST, angle=0.5)
        b = contour_calculus(A8, F_TEST, angle=2.5)
        assert rel(a, b) <= 1e-7

    def test_regularised_nondecaying(self):
        f = ScalarFunction(func=lambda z: 1 / (1 + np.asarray(z, dtype=complex)), max_order=0, label="1/(1+z)",
                           holomorphic=True, sector=math.pi, decay=1.0, limit_zero=1.0)
        assert rel(contour_calculus(A8, f), np.linalg.inv(np.eye(8) + A8.matrix)) <= 1e-8

    def test_nonnormal_matches_eigenbasis(self):
        a = np.array([[1.0, 0.5, 0.0], [0.0, 2.0, 0.3], [0.0, 0.0, 3.0]])
        op = SectorialOperator.from_matrix(a)
        assert rel(contour_calculus(op, F_TEST), spectral_calculus(op, F_TEST)) <= 1e-8

    def test_not_converged(self):
        with pytest.raises(ContourNotConverged):
            contour_calculus(A8, F_TEST, max_doublings=0, tol=1e-30, fail_tol=1e-30)

    def test_convergence_lemma(self):
        # f_n(z) = z/(1/n + z) * 1/(1 + z/n) -> 1 boundedly; f_n(A) -> I entrywise
        errs = []
        for n in (10, 100, 1000):
            f = fn(lambda z, n=n: z / (1.0 / n + z) / (1 + z / n))
            errs.append(np.max(np.abs(contour_calculus(A8, f) - np.eye(8))))
        assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-2


class TestSpectralCalculus:
    def test_one_is_identity(self):
        f = ScalarFunction(func=lambda t: np.ones(np.shape(t)), max_order=0, label="1")
        np.testing.assert_allclose(spectral_calculus(A8, f), np.eye(8), atol=1e-13)

    def test_imag_power_agrees(self):
        assert rel(spectral_calculus(A8, imag_power(0.8)), imaginary_power(A8, 0.8)) <= 1e-10

    def test_bump_idempotent_like(self):
        P = make_partition(6)
        for n in (-1, 0, 1):
            phi = spectral_calculus(A8, P.phi(n))
            neigh = sum(spectral_calculus(A8, P.phi(l)) for l in (n - 1, n, n + 1))
            assert np.linalg.norm(phi @ neigh - phi) <= 1e-10


class TestPaleyLittlewood:
    def test_scalar(self):
        op = SectorialOperator.from_matrix([[1.0]])
        fam = paley_littlewood_family(op, make_partition(3))
        nonzero = [n for n, f in zip(range(-3, 4), fam) if abs(f[0, 0]) > 0]
        assert set(nonzero) <= {-1, 0, 1}
        assert sum(f[0, 0] for f in fam) == pytest.approx(1.0, abs=1e-12)

    def test_sum_is_identity(self):
        fam = paley_littlewood_family(A8, make_partition(5))
        assert np.linalg.norm(sum(fam) - np.eye(8)) <= 1e-10

    def test_disjointness(self):
        fam = paley_littlewood_family(A8, make_partition(5))
        for i in range(len(fam)):
            for j in range(i + 2, len(fam)):
                assert np.linalg.norm(fam[i] @ fam[j]) <= 1e-10

    def test_not_covered(self):
        with pytest.raises(SpectrumNotCovered):
            paley_littlewood_family(A8, make_partition(1))
