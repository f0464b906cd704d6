import math

import numpy as np
import pytest

from robonav.planner import (
    CommandKind,
    MotionCommand,
    NoAdmissibleWaypoint,
    Obstacle,
    PlannerParams,
    RobotPose,
    choose_waypoint,
    next_command,
    path_blocked,
    plan,
)

from oracles import sampled_blocked

P = PlannerParams(clearance=2.0, goal_tolerance=1.0)


def test_path_blocked_examples():
    assert path_blocked((0, 0), (10, 0), (5, 0), 1, 2)
    assert not path_blocked((0, 0), (10, 0), (5, 5), 1, 2)


def test_obstacles_behind_or_beyond_do_not_block():
    assert not path_blocked((0, 0), (10, 0), (-1, 0), 1, 2)
    assert not path_blocked((0, 0), (10, 0), (11, 0), 1, 2)


def test_path_blocked_against_sampling(rng):
    checked = 0
    for _ in range(2000):
        robot, goal, center = rng.uniform(0, 100, size=(3, 2))
        r, cl = rng.uniform(1, 10), rng.uniform(1, 10)
        want, dmin, tmin = sampled_blocked(robot, goal, center, r, cl)
        # skip cases within the sampling resolution of the decision boundary
        L = math.dist(robot, goal)
        if abs(dmin - (r + cl)) < 0.01 or 0 < min(tmin, 1 - tmin) * L < 0.02:
            continue
        checked += 1
        assert path_blocked(robot, goal, center, r, cl) == want
    assert checked > 1500


def test_waypoint_is_goal_without_obstacles():
    assert choose_waypoint((0, 0), (10, 0), [], P) == (10.0, 0.0)


def test_symmetric_tie_goes_left():
    wp = choose_waypoint((0, 0), (10, 0), [Obstacle((5, 0), 1)], P)
    assert wp == pytest.approx((5.0, 3.6))


def test_shorter_side_chosen():
    wp = choose_waypoint((0, 0), (10, 0), [Obstacle((5, 0.5), 1)], P)
    assert wp[1] < 0


def test_nearest_blocking_obstacle_first():
    obs = [Obstacle((8, 0), 1), Obstacle((3, 0), 1)]
    assert choose_waypoint((0, 0), (10, 0), obs, P) == pytest.approx((3.0, 3.6))


def test_offset_grows_past_neighbour():
    # a neighbour sits on the first left candidate; the offset grows by 20% steps
    obs = [Obstacle((5, 0), 1), Obstacle((5, 3.6), 0.5)]
    wp = choose_waypoint((0, 0), (10, 0), obs, P)
    assert wp[0] == 5
    assert all(math.dist(wp, o.center) >= o.radius + P.clearance for o in obs)
    assert wp[1] > 3.6


def test_falls_back_to_other_side_then_fails():
    # the left side is walled off for all growth steps
    left_wall = [Obstacle((5, y), 1.5) for y in np.arange(3.0, 12.0, 1.0)]
    wp = choose_waypoint((0, 0), (10, 0), [Obstacle((5, 0), 1)] + left_wall, P)
    assert wp[1] < 0
    right_wall = [Obstacle((5, -y), 1.5) for y in np.arange(3.0, 12.0, 1.0)]
    with pytest.raises(NoAdmissibleWaypoint):
        choose_waypoint((0, 0), (10, 0), [Obstacle((5, 0), 1)] + left_wall + right_wall, P)


def single_obstacle_scenes(rng, n):
    """Robot and goal placed far enough from the obstacle along the track for a detour to exist."""
    scenes = []
    while len(scenes) < n:
        r, cl = rng.uniform(1, 8), rng.uniform(1, 8)
        center = rng.uniform(-20, 20, 2)
        ang = rng.uniform(0, 2 * math.pi)
        d = np.array([math.cos(ang), math.sin(ang)])
        n_hat = np.array([-d[1], d[0]])
        lateral = rng.uniform(-(r + cl), r + cl) * 0.95
        # the detour point sits 1.2 (r + cl) off the centre; legs clear it if the ends are >= 1.81 (r + cl) away
        before, after = rng.uniform(1.85, 4.0, 2) * (r + cl)
        robot = center - before * d + lateral * n_hat
        goal = center + after * d + lateral * n_hat
        scenes.append((tuple(robot), tuple(goal), Obstacle(tuple(center), r), PlannerParams(clearance=cl, goal_tolerance=min(1.0, cl / 2))))
    return scenes


def test_detour_legs_clear_by_sampling(rng):
    for robot, goal, obs, params in single_obstacle_scenes(rng, 100):
        assert path_blocked(robot, goal, obs.center, obs.radius, params.clearance)
        wp = choose_waypoint(robot, goal, [obs], params)
        for a, b in ((robot, wp), (wp, goal)):
            blocked, _, _ = sampled_blocked(a, b, obs.center, obs.radius, params.clearance)
            assert not blocked


def test_next_command_examples():
    params = PlannerParams()
    assert next_command(RobotPose((0, 0)), (10, 0), (1, 1), params).kind is CommandKind.STOP
    cmd = next_command(RobotPose((0, 0), 0), (0, 20), (0, 20), params)
    assert cmd == MotionCommand.turn(90)
    assert next_command(RobotPose((0, 0), 3), (25, 0), (25, 0), params) == MotionCommand.forward(10)
    assert next_command(RobotPose((0, 0), 0), (4, 0), (40, 0), params) == MotionCommand.forward(4)


def test_command_validation_and_format():
    with pytest.raises(ValueError):
        MotionCommand(CommandKind.FORWARD, 0.0)
    with pytest.raises(ValueError):
        MotionCommand(CommandKind.TURN, -180.0)
    assert MotionCommand.turn(-180).value == 180.0
    assert MotionCommand.turn(90).format() == "TURN 90.000"
    assert MotionCommand.forward(2.5).format() == "FORWARD 2.500"
    assert MotionCommand.stop().format() == "STOP"


def test_params_validation():
    with pytest.raises(ValueError):
        PlannerParams(max_step=0)
    with pytest.warns(UserWarning):
        PlannerParams(clearance=3, goal_tolerance=3)


def drive(pose, goal, params, limit=200):
    """Apply commands with exact kinematics; returns the command list."""
    cmds = []
    x, y = pose.position
    heading = pose.heading
    for _ in range(limit):
        _, cmd = plan(RobotPose((x, y), heading), goal, [], params)
        cmds.append(cmd)
        if cmd.kind is CommandKind.STOP:
            return cmds
        if cmd.kind is CommandKind.TURN:
            heading += cmd.value
        else:
            before = math.dist((x, y), goal)
            x += cmd.value * math.cos(math.radians(heading))
            y += cmd.value * math.sin(math.radians(heading))
            assert math.dist((x, y), goal) < before
    raise AssertionError("no STOP")


def test_progress_bound(rng):
    params = PlannerParams()
    for _ in range(200):
        start = tuple(rng.uniform(0, 120, 2))
        goal = tuple(rng.uniform(0, 120, 2))
        d0 = math.dist(start, goal)
        cmds = drive(RobotPose(start, rng.uniform(-180, 180)), goal, params)
        assert len(cmds) <= math.ceil(d0 / params.max_step) + 3


def test_plan_is_deterministic():
    obs = [Obstacle((50, 45), 7), Obstacle((70, 40), 5)]
    a = plan(RobotPose((15, 45), 10), (100, 45), obs, PlannerParams())
    b = plan(RobotPose((15, 45), 10), (100, 45), obs, PlannerParams())
    assert a == b


def test_plan_avoids_obstacle_on_the_detour_leg():
    params = PlannerParams()
    main = Obstacle((50, 45), 6)
    base = (6 + 8) * 1.2
    # a second obstacle sits on the straight line from the robot to the first detour point
    side = Obstacle((32, 45 + base * 0.45), 3)
    wp, _ = plan(RobotPose((15, 45)), (90, 45), [main, side], params)
    for o in (main, side):
        assert not path_blocked((15, 45), wp, o.center, o.radius, params.clearance)
