"""
Тести для майнінгу трійок та триплетної втрати.
"""

import numpy as np
import pytest

from comhom.common.exceptions import ConfigurationError
from comhom.losses.centroids import REAL, SYNTHETIC, CentroidBank, update_centroids
from comhom.losses.triplets import BASIC, CENTROIDS, HARD, TripletConfig, mine_triplets, triplet_loss

UP_PINCH = 8 + 0 * 4 + 1
UP_THUMB = 8 + 0 * 4 + 0


def _vec(*values):
    return np.array(values, dtype=np.float64)[:, None]


@pytest.mark.parametrize("d_pos, d_neg, expected", [(0.0, 2.0, 0.0), (9.0, 4.0, 6.0)])
def test_hinge_values(d_pos, d_neg, expected):
    """1-D вектори з заданими квадратами відстаней d(a,p) та d(a,n), γ = 1."""
    result = triplet_loss(_vec(0.0), _vec(np.sqrt(d_pos)), _vec(np.sqrt(d_neg)), margin=1.0)
    assert np.isclose(result.value, expected)


def test_collapsed_triplet_yields_margin():
    a = np.ones((2, 3))
    result = triplet_loss(a, a.copy(), a.copy(), margin=0.7)
    assert np.isclose(result.value, 0.7)
    assert result.active == 2


def test_empty_triplets_contribute_zero():
    result = triplet_loss(np.zeros((0, 4)), np.zeros((0, 4)), np.zeros((0, 4)), margin=1.0)
    assert result.value == 0.0
    assert result.empty


def test_triplet_gradients_match_finite_differences():
    """Аналітичні градієнти за a, p, n збігаються з центральними різницями."""
    # Arrange
    rng = np.random.default_rng(0)
    a, p, n = (rng.standard_normal((4, 3)) for _ in range(3))
    result = triplet_loss(a, p, n, margin=1.0)
    eps = 1e-6

    # Act / Assert
    for target, grad in ((a, result.d_anchor), (p, result.d_positive), (n, result.d_negative)):
        for index in np.ndindex(target.shape):
            original = target[index]
            target[index] = original + eps
            plus = triplet_loss(a, p, n, margin=1.0).value
            target[index] = original - eps
            minus = triplet_loss(a, p, n, margin=1.0).value
            target[index] = original
            assert np.isclose(grad[index], (plus - minus) / (2 * eps), atol=1e-6)


def test_only_valid_assignment_is_found():
    """Реальний якір (Up,Pinch) отримує синтетичні (Up,Pinch) та (Up,Thumb)."""
    config = TripletConfig(variant=BASIC, triplets_per_anchor=3)

    triplets = mine_triplets(
        config, _vec(0.0), [UP_PINCH], _vec(1.0, 2.0), [UP_PINCH, UP_THUMB], None, np.random.default_rng(0),
    )

    real_rows = np.flatnonzero(triplets.anchor_is_real)
    assert len(real_rows) == 1
    assert triplets.positives[real_rows[0]] == 1
    assert triplets.negatives[real_rows[0]] == 2


def test_hard_mining_picks_farthest_positive_and_nearest_negative():
    """1-D: якір 0, позитиви {1, 3}, негативи {2, 5} → трійка (0, 3, 2)."""
    # Arrange
    config = TripletConfig(variant=HARD)
    synth = _vec(1.0, 3.0, 2.0, 5.0)
    synth_classes = [UP_PINCH, UP_PINCH, UP_THUMB, UP_THUMB]

    # Act
    triplets = mine_triplets(config, _vec(0.0), [UP_PINCH], synth, synth_classes, None, None)
    anchor, positive, negative = triplets.gather(np.concatenate([_vec(0.0), synth]))

    # Assert
    assert len(triplets) == 1
    assert (anchor[0, 0], positive[0, 0], negative[0, 0]) == (0.0, 3.0, 2.0)
    assert triplets.skipped_anchors == 4


def _brute_force_hard(pool, pool_classes, n_real):
    """Повний перебір пар (p, n) для кожного якоря: max d(a,p) - d(a,n)."""
    expected, skipped = [], 0
    for anchor in range(len(pool)):
        side = np.arange(n_real, len(pool)) if anchor < n_real else np.arange(n_real)
        same = pool_classes[side] == pool_classes[anchor]
        pos, neg = side[same], side[~same]
        if pos.size == 0 or neg.size == 0:
            skipped += 1
            continue
        d_pos = ((pool[pos] - pool[anchor]) ** 2).sum(axis=1)
        d_neg = ((pool[neg] - pool[anchor]) ** 2).sum(axis=1)
        gap = d_pos[:, None] - d_neg[None, :]
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        expected.append((anchor, pos[i], neg[j]))
    return expected, skipped


def test_hard_mining_matches_brute_force():
    """200 випадкових батчів до 64 елементів: Hard збігається з повним перебором."""
    rng = np.random.default_rng(1)
    for _ in range(200):
        # Arrange
        n_real, n_synth = rng.integers(1, 33, size=2)
        classes = rng.choice(np.arange(8, 24), size=rng.integers(2, 6), replace=False)
        real_classes, synth_classes = rng.choice(classes, size=n_real), rng.choice(classes, size=n_synth)
        real, synth = rng.standard_normal((n_real, 3)), rng.standard_normal((n_synth, 3))
        pool = np.concatenate([real, synth])
        expected, skipped = _brute_force_hard(pool, np.concatenate([real_classes, synth_classes]), n_real)

        # Act
        triplets = mine_triplets(TripletConfig(variant=HARD), real, real_classes, synth, synth_classes, None, None)

        # Assert
        assert list(zip(triplets.anchors, triplets.positives, triplets.negatives)) == expected
        assert triplets.skipped_anchors == skipped


def test_basic_mining_covers_every_valid_pair():
    """6 елементів, 10⁴ вибірок: лише коректні трійки, і кожна коректна трапляється."""
    # Arrange
    real_classes, synth_classes = np.array([8, 8, 9]), np.array([8, 9, 9])
    real, synth = np.zeros((3, 2)), np.zeros((3, 2))
    pool_classes = np.concatenate([real_classes, synth_classes])
    valid = set()
    for anchor in range(6):
        side = range(3, 6) if anchor < 3 else range(3)
        for p in side:
            for n in side:
                if pool_classes[p] == pool_classes[anchor] and pool_classes[n] != pool_classes[anchor]:
                    valid.add((anchor, p, n))
    config = TripletConfig(variant=BASIC, triplets_per_anchor=1)
    rng = np.random.default_rng(0)

    # Act
    seen = set()
    for _ in range(10_000):
        triplets = mine_triplets(config, real, real_classes, synth, synth_classes, None, rng)
        seen.update(zip(triplets.anchors.tolist(), triplets.positives.tolist(), triplets.negatives.tolist()))

    # Assert
    assert seen <= valid
    assert seen == valid


def test_basic_mining_exhausts_candidates():
    """N = 3, але лише 2 позитивні кандидати → 2 трійки для якоря."""
    config = TripletConfig(variant=BASIC, triplets_per_anchor=3)
    synth = np.zeros((6, 1))
    synth_classes = [UP_PINCH, UP_PINCH, UP_THUMB, UP_THUMB, UP_THUMB, UP_THUMB]

    triplets = mine_triplets(config, _vec(0.0), [UP_PINCH], synth, synth_classes, None, np.random.default_rng(0))

    real_rows = triplets.anchor_is_real
    assert real_rows.sum() == 2
    assert len(set(triplets.positives[real_rows])) == 2
    assert len(set(triplets.negatives[real_rows])) == 2


def test_basic_mining_respects_sides_and_classes(tiny_pool):
    """Кандидати беруться з протилежної сторони; позитив того ж класу, негатив - іншого."""
    real, real_classes, synth, synth_classes = tiny_pool
    pool_classes = np.concatenate([real_classes, synth_classes])

    triplets = mine_triplets(TripletConfig(), real, real_classes, synth, synth_classes, None, np.random.default_rng(3))

    n_real = len(real_classes)
    is_real = triplets.anchors < n_real
    np.testing.assert_array_equal(is_real, triplets.anchor_is_real)
    assert np.all((triplets.positives >= n_real) == is_real)
    assert np.all((triplets.negatives >= n_real) == is_real)
    assert np.all(pool_classes[triplets.positives] == pool_classes[triplets.anchors])
    assert np.all(pool_classes[triplets.negatives] != pool_classes[triplets.anchors])


def test_centroid_mining_uses_opposite_side(tiny_pool):
    # Arrange
    real, real_classes, synth, synth_classes = tiny_pool
    bank = CentroidBank.empty(feature_dim=2)
    bank = update_centroids(bank, real, real_classes, REAL, 0.9)
    bank = update_centroids(bank, synth, synth_classes, SYNTHETIC, 0.9)

    # Act
    triplets = mine_triplets(TripletConfig(variant=CENTROIDS), real, real_classes, synth, synth_classes, bank,
                             np.random.default_rng(0))

    # Assert
    assert triplets.uses_centroids
    first_real = int(np.flatnonzero(triplets.anchor_is_real)[0])
    anchor_class = real_classes[triplets.anchors[first_real]]
    np.testing.assert_allclose(triplets.positive_vectors[first_real], bank.centroid(SYNTHETIC, anchor_class))


def test_centroid_mining_skips_uninitialized_classes(tiny_pool):
    real, real_classes, synth, synth_classes = tiny_pool
    triplets = mine_triplets(TripletConfig(variant=CENTROIDS), real, real_classes, synth, synth_classes,
                             CentroidBank.empty(feature_dim=2), np.random.default_rng(0))
    assert len(triplets) == 0
    assert triplets.skipped_anchors == len(real_classes) + len(synth_classes)


def test_mining_requires_both_sides():
    with pytest.raises(ConfigurationError):
        mine_triplets(TripletConfig(), np.zeros((0, 1)), [], _vec(1.0), [UP_PINCH], None, np.random.default_rng(0))


@pytest.fixture
def tiny_pool():
    rng = np.random.default_rng(5)
    real_classes = np.array([8, 8, 9, 9, 12, 12])
    synth_classes = np.array([8, 9, 12, 8, 9, 12])
    return rng.standard_normal((6, 2)), real_classes, rng.standard_normal((6, 2)), synth_classes
