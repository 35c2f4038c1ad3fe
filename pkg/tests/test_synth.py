import numpy as np
import pytest

from equifair import (
    CohortConfig,
    EmbeddingPlantConfig,
    ValidationError,
    confusion_rates,
    generate_cohort,
    generate_embeddings,
    identify_subspace,
)
from equifair.synth import (
    ETHNICITY_PROPORTIONS,
    SEX_PROPORTIONS,
    ScoreModel,
    gapped_score_models,
    normal_cdf,
)
from equifair.wordsets import GENDER_SETS


class TestCohortConfig:
    def test_defaults(self):
        cfg = CohortConfig()
        assert cfg.groups == {"F": 0.440, "M": 0.560}
        assert cfg.positive_rate == 0.131

    def test_proportions_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            CohortConfig(groups={"a": 0.5, "b": 0.6})

    def test_json_round_trip(self):
        cfg = CohortConfig(groups={"a": 0.25, "b": 0.75}, n_samples=50, seed=4)
        back = CohortConfig.from_dict(cfg.to_dict())
        assert back == cfg


class TestGenerateCohort:
    def test_same_seed_identical_output(self):
        cfg = CohortConfig(n_samples=500, seed=11)
        a = generate_cohort(cfg).modalities[0]
        b = generate_cohort(cfg).modalities[0]
        assert a.ids == b.ids and a.groups == b.groups
        np.testing.assert_array_equal(a.scores, b.scores)
        np.testing.assert_array_equal(a.y_true, b.y_true)

    def test_different_seed_differs(self):
        a = generate_cohort(CohortConfig(n_samples=500, seed=1)).modalities[0]
        b = generate_cohort(CohortConfig(n_samples=500, seed=2)).modalities[0]
        assert not np.array_equal(a.scores, b.scores)

    def test_group_proportions_concentrate(self):
        n = 100_000
        cfg = CohortConfig(groups=ETHNICITY_PROPORTIONS, n_samples=n, seed=13)
        preds = generate_cohort(cfg).modalities[0]
        counts = {g: preds.groups.count(g) for g in ETHNICITY_PROPORTIONS}
        for g, p in ETHNICITY_PROPORTIONS.items():
            tol = 3 * np.sqrt(p * (1 - p) / n)
            assert abs(counts[g] / n - p) <= tol

    def test_positive_rate_concentrates(self):
        n = 100_000
        preds = generate_cohort(CohortConfig(n_samples=n, seed=14)).modalities[0]
        rate = preds.y_true.mean()
        assert abs(rate - 0.131) <= 3 * np.sqrt(0.131 * 0.869 / n)

    def test_hard_labels_threshold_half(self):
        preds = generate_cohort(CohortConfig(n_samples=300, seed=5)).modalities[0]
        np.testing.assert_array_equal(preds.y_hat, (preds.scores >= 0.5).astype(np.int8))

    def test_empirical_rates_near_analytic(self):
        groups = {"A": 0.5, "B": 0.5}
        cfg = CohortConfig(
            groups=groups,
            positive_rate=0.4,
            score_models=gapped_score_models(groups, 0.6, 0.85, 0.15),
            n_samples=60_000,
            seed=15,
        )
        cohort = generate_cohort(cfg)
        rates = confusion_rates(cohort.modalities[0])
        for g in groups:
            e = rates[g]
            ana = cohort.analytic_rates[g]
            assert abs(e.tpr - ana["tpr"]) <= 3 * np.sqrt(ana["tpr"] * (1 - ana["tpr"]) / e.n_pos)
            assert abs(e.fpr - ana["fpr"]) <= 3 * np.sqrt(ana["fpr"] * (1 - ana["fpr"]) / e.n_neg)

    def test_uninformative_window_has_chance_auc(self):
        from equifair import auc_roc

        cfg = CohortConfig(
            groups={"A": 1.0},
            positive_rate=0.5,
            n_samples=20_000,
            seed=16,
            modality_windows=((0.0, 0.0),),  # never informative
        )
        preds = generate_cohort(cfg).modalities[0]
        assert abs(auc_roc(preds.scores, preds.y_true) - 0.5) < 0.02

    def test_sidecar_contains_analytic_rates(self):
        import json

        cohort = generate_cohort(CohortConfig(n_samples=50, seed=2))
        doc = json.loads(cohort.sidecar_json())
        assert set(doc["analytic_rates"]) == set(SEX_PROPORTIONS)
        assert doc["config"]["seed"] == 2


class TestScoreModels:
    def test_analytic_rates_are_gaussian_tails(self):
        m = ScoreModel(mu_neg=-1.0, mu_pos=2.0, sigma_neg=2.0, sigma_pos=1.0)
        assert m.analytic_tpr() == pytest.approx(normal_cdf(2.0))
        assert m.analytic_fpr() == pytest.approx(normal_cdf(-0.5))

    def test_gapped_models_hit_requested_rates(self):
        models = gapped_score_models({"a": 0.5, "b": 0.5}, tpr_low=0.6, tpr_high=0.85, fpr=0.15)
        assert models["a"].analytic_tpr() == pytest.approx(0.60, abs=1e-9)
        assert models["b"].analytic_tpr() == pytest.approx(0.85, abs=1e-9)
        assert models["a"].analytic_fpr() == pytest.approx(0.15, abs=1e-9)


class TestGenerateEmbeddings:
    def test_noiseless_recovery_is_exact(self):
        cfg = EmbeddingPlantConfig(equality_sets=GENDER_SETS, vocab_size=50, dim=25, noise=0.0, seed=3)
        emb, sets, planted = generate_embeddings(cfg)
        sub = identify_subspace(emb, sets, k=1)
        assert abs(float(sub.basis[0] @ planted.basis[0])) == pytest.approx(1.0, abs=1e-9)

    def test_noisy_recovery(self):
        cfg = EmbeddingPlantConfig(equality_sets=GENDER_SETS, vocab_size=50, dim=25, noise=0.01, seed=4)
        emb, sets, planted = generate_embeddings(cfg)
        sub = identify_subspace(emb, sets, k=1)
        assert abs(float(sub.basis[0] @ planted.basis[0])) >= 0.99

    def test_four_class_three_direction_recovery(self):
        quads = (("q1", "q2", "q3", "q4"), ("q5", "q6", "q7", "q8"), ("q9", "q10", "q11", "q12"))
        cfg = EmbeddingPlantConfig(equality_sets=quads, vocab_size=30, dim=20, noise=0.01, seed=5, n_directions=3)
        emb, sets, planted = generate_embeddings(cfg)
        sub = identify_subspace(emb, sets, k=3)
        principal_cosines = np.linalg.svd(sub.basis @ planted.basis.T, compute_uv=False)
        assert np.prod(principal_cosines) >= 0.98

    def test_deterministic(self):
        cfg = EmbeddingPlantConfig(equality_sets=GENDER_SETS, vocab_size=40, dim=10, noise=0.02, seed=6)
        a, _, _ = generate_embeddings(cfg)
        b, _, _ = generate_embeddings(cfg)
        np.testing.assert_array_equal(a.vectors, b.vectors)

    def test_vectors_unit_norm(self):
        cfg = EmbeddingPlantConfig(equality_sets=GENDER_SETS, vocab_size=40, dim=10, noise=0.05, seed=7)
        emb, _, _ = generate_embeddings(cfg)
        np.testing.assert_allclose(np.linalg.norm(emb.vectors, axis=1), 1.0, atol=1e-12)

    def test_dimension_must_exceed_directions(self):
        with pytest.raises(ValidationError):
            EmbeddingPlantConfig(equality_sets=(("a", "b", "c", "d"),), vocab_size=10, dim=3)

    def test_vocab_size_must_cover_set_words(self):
        with pytest.raises(ValidationError):
            EmbeddingPlantConfig(equality_sets=GENDER_SETS, vocab_size=5, dim=25)
