import pytest
from hypothesis import given, strategies as st

from qgrid.gridworld import GridSpec, canonical_actions, make_2d, make_3d, make_nd


def test_paper_2d_has_four_actions():
    spec = make_2d(50, 50, (0, 0), (49, 49))
    assert spec.num_actions == 4
    assert spec.actions == ((0, 1), (0, -1), (-1, 0), (1, 0))


def test_paper_3d_has_six_actions():
    spec = make_3d(50, 50, 50, (0, 0, 0), (49, 49, 49))
    assert spec.num_actions == 6
    assert spec.actions[4] == (0, 0, 1)
    assert spec.actions[5] == (0, 0, -1)


def test_minimal_worlds():
    assert make_2d(1, 2, (0, 0), (0, 1)).num_states == 2
    assert make_3d(2, 2, 2, (0, 0, 0), (1, 1, 1)).num_states == 8


@pytest.mark.parametrize(
    "build, match",
    [
        (lambda: make_2d(50, 50, (0, 0), (50, 49)), "goal coordinate 0"),
        (lambda: make_2d(50, 50, (0, -1), (49, 49)), "start coordinate 1"),
        (lambda: make_3d(50, 50, 50, (0, 0, 0), (0, 0, 0)), "coincide"),
        (lambda: make_nd([], (), ()), "at least one axis"),
        (lambda: make_2d(0, 5, (0, 0), (0, 1)), "extent"),
        (lambda: make_2d(5, 5, (0, 0, 0), (1, 1)), "coordinates"),
    ],
)
def test_construction_errors(build, match):
    with pytest.raises(ValueError, match=match):
        build()


def test_action_table_must_cover_every_axis():
    with pytest.raises(ValueError):
        GridSpec((3, 3), (0, 0), (2, 2), ((1, 0), (-1, 0), (0, 1), (0, 1)))
    with pytest.raises(ValueError):
        GridSpec((3, 3), (0, 0), (2, 2), ((1, 0), (-1, 0), (0, 2), (0, -1)))


def test_make_nd_canonical_ordering():
    spec = make_nd([50, 50], (0, 0), (49, 49))
    assert spec.actions == ((1, 0), (-1, 0), (0, 1), (0, -1))
    assert spec.actions != make_2d(50, 50, (0, 0), (49, 49)).actions
    assert make_nd([10] * 4, (0,) * 4, (9,) * 4).num_actions == 8
    assert make_nd([5], (0,), (4,)).actions == ((1,), (-1,))


def test_is_valid_position():
    s2 = make_2d(50, 50, (0, 0), (49, 49))
    s3 = make_3d(50, 50, 50, (0, 0, 0), (49, 49, 49))
    assert s2.is_valid_position((0, 0))
    assert not s2.is_valid_position((49, 50))
    assert not s3.is_valid_position((0, 0, -1))
    with pytest.raises(ValueError):
        s2.is_valid_position((1, 2, 3))


def test_rewards():
    spec = make_2d(50, 50, (0, 0), (49, 49))
    assert spec.get_reward((49, 49)) == 1.0
    assert spec.get_reward((0, 0)) == 0.0
    assert spec.get_reward((10, 20)) == 0.0
    custom = make_2d(3, 3, (0, 0), (2, 2), goal_reward=5.0, step_reward=-1.0)
    assert custom.get_reward((2, 2)) == 5.0
    assert custom.get_reward((1, 1)) == -1.0


def test_take_action_examples():
    s2 = make_2d(50, 50, (0, 0), (49, 49))
    s3 = make_3d(50, 50, 50, (0, 0, 0), (49, 49, 49))
    assert s2.take_action((5, 5), 0) == (5, 6)
    assert s2.take_action((5, 5), 1) == (5, 4)
    assert s2.take_action((5, 5), 2) == (4, 5)
    assert s2.take_action((5, 5), 3) == (6, 5)
    assert s2.take_action((0, 0), 1) == (0, 0)
    assert s3.take_action((0, 0, 0), 4) == (0, 0, 1)
    assert s3.take_action((0, 0, 0), 5) == (0, 0, 0)
    with pytest.raises(ValueError):
        s2.take_action((0, 0), 4)
    with pytest.raises(ValueError):
        s2.take_action((0, 0), -1)


def test_paper_table_fidelity():
    s2 = make_2d(50, 50, (0, 0), (49, 49))
    s3 = make_3d(50, 50, 50, (0, 0, 0), (49, 49, 49))
    p = (0, 0)
    for a in (3, 0):
        p = s2.take_action(p, a)
    assert p == (1, 1)
    p = (0, 0, 0)
    for a in (3, 0, 4):
        p = s3.take_action(p, a)
    assert p == (1, 1, 1)


def test_canonical_actions_are_unit_moves():
    for dim in range(1, 6):
        table = canonical_actions(dim)
        assert len(table) == 2 * dim
        assert all(sum(abs(v) for v in d) == 1 for d in table)


@st.composite
def grid_state_action(draw):
    dim = draw(st.integers(1, 4))
    extents = draw(st.lists(st.integers(1, 6), min_size=dim, max_size=dim))
    if all(e == 1 for e in extents):
        extents[0] = 2
    start = tuple(0 for _ in extents)
    goal = tuple(e - 1 for e in extents)
    if start == goal:
        goal = tuple(1 if i == 0 else 0 for i in range(dim)) if extents[0] > 1 else goal
    maker = draw(st.sampled_from(["nd", "paper"])) if dim in (2, 3) else "nd"
    if maker == "paper":
        spec = make_2d(*extents, start, goal) if dim == 2 else make_3d(*extents, start, goal)
    else:
        spec = make_nd(extents, start, goal)
    state = tuple(draw(st.integers(0, e - 1)) for e in extents)
    action = draw(st.integers(0, spec.num_actions - 1))
    return spec, state, action


@given(grid_state_action())
def test_closure_bounce_and_unit_displacement(case):
    spec, state, action = case
    nxt = spec.take_action(state, action)
    assert spec.is_valid_position(nxt)
    tentative = tuple(s + d for s, d in zip(state, spec.actions[action]))
    assert (nxt == state) == (not spec.is_valid_position(tentative))
    assert sum(abs(a - b) for a, b in zip(state, nxt)) in (0, 1)
    if spec.get_reward(nxt) != 0.0:
        assert nxt == spec.goal
