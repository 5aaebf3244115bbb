import math

import numpy as np
import pytest

from conftest import random_particles
from lb_lab.errors import PartitionError
from lb_lab.models.geometry import Rect, Vec2
from lb_lab.models.particle import ParticleSet
from lb_lab.models.partition import PartitionerKind
from lb_lab.services.partition_domain import make_partitioner
from lb_lab.services.partition_service import (
    hsfc_partition,
    locate,
    mean_velocity_axis,
    norcb_partition,
    rcb_partition,
    rib_partition,
)
from lb_lab.utils.hilbert import hilbert_index_many
from lb_lab.utils.logging import logger


def _random_configs(count: int, seed: int):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(64, 10001))
        p = int(rng.choice([2, 4, 8, 16, 32]))
        yield random_particles(n, seed=seed * 1000 + i, velocity_scale=float(rng.choice([0.0, 0.01, 1.0]))), p


@pytest.mark.parametrize("kind", list(PartitionerKind))
def test_balance_bound(kind):
    for particles, p in _random_configs(100, seed=list(PartitionerKind).index(kind) + 1):
        assignment = make_partitioner(kind).partition(particles, p).assignment
        counts = assignment.counts()
        assert counts.sum() == len(particles)
        assert assignment.spread() <= p - 1
        assert assignment.spread() <= math.ceil(math.log2(p))


def test_balance_with_duplicate_positions():
    pos = np.repeat(np.array([[0.2, 0.2], [0.8, 0.8]]), 50, axis=0)
    particles = ParticleSet(ids=np.arange(100), pos=pos, vel=np.zeros((100, 2)))
    for kind in PartitionerKind:
        assignment = make_partitioner(kind).partition(particles, 8).assignment
        assert assignment.spread() <= 7


def test_norcb_degenerates_to_rcb_without_motion():
    for i in range(50):
        particles = random_particles(200 + 37 * i, seed=500 + i, velocity_scale=0.0)
        _, informed = norcb_partition(particles, 16)
        _, baseline = rcb_partition(particles, 16)
        assert np.array_equal(informed.ranks, baseline.ranks)


def test_norcb_degenerates_below_threshold():
    particles = random_particles(1000, seed=3, velocity_scale=0.0)
    particles.vel[:] = (1e-4, -2e-4)
    _, informed = norcb_partition(particles, 8)
    _, baseline = rcb_partition(particles, 8)
    assert np.array_equal(informed.ranks, baseline.ranks)


def test_norcb_cuts_follow_mean_velocity(moving_particles):
    particles = moving_particles
    particles.vel += np.array([0.8, -0.3])
    tree, assignment = norcb_partition(particles, 16)
    checked = 0
    for node in tree.internal_nodes():
        members = (assignment.ranks >= node.lo) & (assignment.ranks < node.hi)
        mean = particles.vel[members].mean(axis=0)
        norm = float(np.hypot(*mean))
        if norm <= 1e-3:
            continue
        d = node.cut.direction
        assert abs(d.cross(Vec2(mean[0] / norm, mean[1] / norm))) <= 1e-9
        checked += 1
    assert checked == 15


def test_rcb_cuts_longest_side_first():
    particles = random_particles(400, seed=5, width=2.0, height=1.0)
    tree, assignment = rcb_partition(particles, 2)
    assert tree.root.cut.direction == Vec2(0.0, 1.0)
    left_x = particles.pos[assignment.ranks == 0, 0]
    right_x = particles.pos[assignment.ranks == 1, 0]
    assert left_x.max() <= right_x.min()


def test_rcb_on_tall_box_splits_vertically():
    particles = random_particles(400, seed=6, width=1.0, height=3.0)
    tree, assignment = rcb_partition(particles, 2)
    assert tree.root.cut.direction == Vec2(1.0, 0.0)
    low = particles.pos[assignment.ranks == 0, 1]
    high = particles.pos[assignment.ranks == 1, 1]
    # key is -y, so the LowerOrEqual half is the upper one
    assert low.min() >= high.max()


def test_rib_splits_along_principal_axis(rng):
    t = rng.uniform(-1.0, 1.0, 500)
    pos = np.column_stack((0.5 + 0.3 * t, 0.5 + 0.3 * t + rng.normal(scale=0.01, size=500)))
    particles = ParticleSet(ids=np.arange(500), pos=pos, vel=np.zeros((500, 2)))
    tree, assignment = rib_partition(particles, 2)
    d = tree.root.cut.direction
    # cut runs across the diagonal
    assert abs(d.dot(Vec2(math.sqrt(0.5), math.sqrt(0.5)))) < 0.05
    projection = pos @ np.array([math.sqrt(0.5), math.sqrt(0.5)])
    assert projection[assignment.ranks == 0].max() <= projection[assignment.ranks == 1].min() + 0.05


def test_rib_falls_back_on_isotropic_input():
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    particles = ParticleSet(ids=np.arange(4), pos=pos, vel=np.zeros((4, 2)))
    _, informed = rib_partition(particles, 2, eigengap=1e-9)
    _, baseline = rcb_partition(particles, 2)
    assert np.array_equal(informed.ranks, baseline.ranks)


@pytest.mark.parametrize("kind", [PartitionerKind.NORCB, PartitionerKind.RCB, PartitionerKind.RIB])
def test_locate_agrees_with_build_time_assignment(kind, moving_particles):
    result = make_partitioner(kind).partition(moving_particles, 8)
    located = result.tree.locate_many(moving_particles.pos)
    assert np.array_equal(located, result.assignment.ranks)
    for i in range(0, len(moving_particles), 37):
        assert locate(result.tree, Vec2.from_array(moving_particles.pos[i])) == result.assignment.ranks[i]


def _leaf_regions(node, path=()):
    if node.is_leaf:
        yield node.rank, path
        return
    yield from _leaf_regions(node.left, path + ((node.cut, True),))
    yield from _leaf_regions(node.right, path + ((node.cut, False),))


@pytest.mark.parametrize("kind", [PartitionerKind.NORCB, PartitionerKind.RCB, PartitionerKind.RIB])
def test_locate_matches_half_plane_intersection(kind, moving_particles, rng):
    tree = make_partitioner(kind).partition(moving_particles, 8).tree
    regions = list(_leaf_regions(tree.root))
    for p in rng.uniform(0.0, 1.0, size=(300, 2)):
        point = Vec2.from_array(p)
        inside = [
            rank
            for rank, path in regions
            if all((cut.direction.cross(point - cut.origin) >= 0.0) == lower for cut, lower in path)
        ]
        assert inside == [locate(tree, point)]


def test_tree_shape(moving_particles):
    tree, _ = norcb_partition(moving_particles, 16)
    assert tree.depth == 4
    assert [leaf.rank for leaf in tree.leaves()] == list(range(16))
    assert len(tree.internal_nodes()) == 15


@pytest.mark.parametrize("order, n_parts", [(8, 10), (16, 4), (16, 7)])
def test_hsfc_chunks_follow_curve_order(order, n_parts):
    particles = random_particles(1001, seed=9)
    domain = Rect.unit_square()
    assignment = hsfc_partition(particles, n_parts, order=order, domain=domain)
    counts = assignment.counts()
    assert counts.max() - counts.min() <= 1
    curve_order = np.lexsort((particles.ids, hilbert_index_many(particles.pos, domain, order)))
    assert np.all(np.diff(assignment.ranks[curve_order]) >= 0)


@pytest.mark.parametrize("order", [6, 16])
def test_hsfc_locate_reproduces_assignment(order):
    particles = random_particles(777, seed=10)
    result = make_partitioner(PartitionerKind.HSFC, domain=Rect.unit_square(), hilbert_order=order).partition(particles, 12)
    assert np.array_equal(result.tessellation.locate_many(particles.pos, particles.ids), result.assignment.ranks)


def test_hsfc_grid_gives_each_rank_a_quadrant():
    side = 16
    coords = (np.arange(side) + 0.5) / side
    xs, ys = np.meshgrid(coords, coords)
    pos = np.column_stack([xs.ravel(), ys.ravel()])
    particles = ParticleSet(ids=np.arange(len(pos)), pos=pos, vel=np.zeros_like(pos))
    assignment = hsfc_partition(particles, 4, order=4, domain=Rect.unit_square())
    quadrant = (pos[:, 0] > 0.5).astype(int) * 2 + (pos[:, 1] > 0.5).astype(int)
    for rank in range(4):
        owned = set(quadrant[assignment.ranks == rank].tolist())
        assert len(owned) == 1
    assert len({int(quadrant[assignment.ranks == r][0]) for r in range(4)}) == 4


def test_mean_velocity_axis():
    particles = random_particles(10, seed=1)
    particles.vel[:] = (0.0, 0.5)
    bbox = Rect.unit_square()
    assert mean_velocity_axis(particles, bbox) == Vec2(0.0, 0.5)
    particles.vel[:] = 0.0
    assert mean_velocity_axis(particles, Rect(Vec2(0.0, 0.0), Vec2(2.0, 1.0))) == Vec2(0.0, 1.0)


def test_partition_request_errors():
    particles = random_particles(10, seed=2)
    with pytest.raises(PartitionError):
        rcb_partition(particles, 3)
    with pytest.raises(PartitionError):
        norcb_partition(particles, 16)
    with pytest.raises(PartitionError):
        hsfc_partition(particles, 11)
    with pytest.raises(PartitionError):
        rib_partition(random_particles(0, seed=2), 2)
    with pytest.raises(PartitionError):
        norcb_partition(particles, 2, threshold=0.0)


def test_partition_wrappers_log_leaf_sizes(moving_particles):
    messages = []
    handler = logger.add(messages.append, level="DEBUG", format="{message}")
    try:
        rcb_partition(moving_particles, 4)
        hsfc_partition(moving_particles, 3, domain=Rect.unit_square())
    finally:
        logger.remove(handler)
    assert any(m.startswith("rcb partition of 512 particles into 4 parts (leaf sizes 128..128)") for m in messages)
    assert any(m.startswith("hsfc partition of 512 particles into 3 parts (leaf sizes 170..171)") for m in messages)
