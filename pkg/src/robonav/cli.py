"""Command-line entry point.

Exit codes: 0 success, 1 parse error, 2 degenerate calibration, 3 detection
failure, 4 step limit (or no admissible waypoint), 5 collision.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from robonav import calibration as cal
from robonav.config import ConfigError, SimConfig, read_config
from robonav.imaging import PpmError, load_ppm, save_ppm
from robonav.measurement import DistanceReport, build_report
from robonav.planner import (
    MotionCommand,
    NoAdmissibleWaypoint,
    Obstacle,
    PlannerParams,
    RobotPose,
    plan,
)
from robonav.segmentation import (
    ClassifierParams,
    DetectionError,
    extract_blobs,
    label_image,
    render_labels,
    scene_from_blobs,
)
from robonav.synthcam import (
    BoardSpec,
    CameraSpec,
    RenderError,
    calibration_views,
    perceived_obstacles,
    render_arena,
    run_closed_loop,
)

EXIT_OK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_DETECTION, EXIT_STEP_LIMIT, EXIT_COLLISION = range(6)

REPORT_HEADER = "# robonav report: pixel coordinates (u right, v down); BEARING_DEG in image axes"


def _f(x: float) -> str:
    # avoid "-0.000"
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def format_report(report: DistanceReport | None, command: MotionCommand | None, frame_id: int = 0,
                  missing: tuple[str, ...] = (), robot=None, target=None) -> list[str]:
    """One FRAME record of the report format; ``missing`` lists undetected roles."""
    if report is None:
        lines = [f"FRAME {frame_id}"]
        lines.append("ROBOT MISSING" if "robot" in missing else f"ROBOT {_f(robot[0])} {_f(robot[1])}")
        lines.append("TARGET MISSING" if "target" in missing else f"TARGET {_f(target[0])} {_f(target[1])}")
        lines.append("CMD STOP")
        return lines
    lines = [f"FRAME {report.frame_id}", f"ROBOT {_f(report.robot[0])} {_f(report.robot[1])}"]
    tline = f"TARGET {_f(report.target[0])} {_f(report.target[1])} DIST_PX {_f(report.robot_to_target_px)}"
    if report.robot_to_target_cm is not None:
        tline += f" DIST_CM {_f(report.robot_to_target_cm)}"
    lines.append(tline)
    for o in report.obstacles:
        line = f"OBST {o.index} {_f(o.centroid[0])} {_f(o.centroid[1])} DIST_PX {_f(o.distance_px)}"
        if o.distance_cm is not None:
            line += f" DIST_CM {_f(o.distance_cm)}"
        line += f" BEARING_DEG {_f(o.bearing_deg)}"
        lines.append(line)
    lines.append(f"CMD {command.format() if command is not None else 'STOP'}")
    return lines


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--margin", type=int, help="dominance margin (default 40)")
    p.add_argument("--min-value", type=int, help="role channel floor (default 60)")
    p.add_argument("--min-blob-area", type=int, help="smallest kept blob in pixels (default 20)")
    p.add_argument("--clearance", type=float, help="obstacle clearance, cm (default 8)")
    p.add_argument("--goal-tolerance", type=float, help="stop radius around the goal, cm (default 3)")
    p.add_argument("--max-step", type=float, help="longest FORWARD, cm (default 10)")
    p.add_argument("--seed", type=int, help="RNG seed")
    p.add_argument("--format", choices=["p3", "p6"], default="p6", help="PPM output flavour")


def _classifier(args, base: ClassifierParams = ClassifierParams()) -> ClassifierParams:
    return ClassifierParams(
        base.dominance_margin if args.margin is None else args.margin,
        base.min_value if args.min_value is None else args.min_value,
    )


def _planner(args, base: PlannerParams = PlannerParams()) -> PlannerParams:
    return replace(
        base,
        **{k: v for k, v in (("clearance", args.clearance), ("goal_tolerance", args.goal_tolerance),
                             ("max_step", args.max_step)) if v is not None},
    )


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


# --- subcommands ---------------------------------------------------------------

def cmd_calibrate(args) -> int:
    try:
        views = cal.load_correspondences(args.corr_file)
    except cal.CorrespondenceFormatError as exc:
        _err(f"{args.corr_file}: {exc}")
        return EXIT_PARSE
    except OSError as exc:
        _err(str(exc))
        return EXIT_PARSE
    ids = [v.view_id for v in views]
    if args.floor_view is not None and args.floor_view not in ids:
        _err(f"floor view {args.floor_view} not among views {sorted(ids)}")
        return EXIT_PARSE
    try:
        result = cal.calibrate(views)
    except cal.CalibrationError as exc:
        where = f" (view {exc.view_id})" if exc.view_id is not None and f"view {exc.view_id}" not in str(exc) else ""
        _err(f"{exc}{where}")
        return EXIT_DEGENERATE
    Path(args.out_file).write_text(cal.write_calibration(result, args.floor_view))
    flag = "" if result.converged else " (not converged)"
    print(f"rms= {result.rms_reprojection:.9g}{flag}")
    return EXIT_OK


def _pixel_obstacles(obs) -> list[Obstacle]:
    return [Obstacle(b.centroid, b.radius) for b in obs.obstacles]


def cmd_analyze(args) -> int:
    try:
        img = load_ppm(args.image)
    except (PpmError, OSError) as exc:
        _err(f"{args.image}: {exc}")
        return EXIT_PARSE
    gm = None
    if args.calib:
        try:
            gm = cal.read_calibration(Path(args.calib).read_text()).ground_map()
        except (cal.CorrespondenceFormatError, ValueError, OSError) as exc:
            _err(f"{args.calib}: {exc}")
            return EXIT_PARSE

    labels = label_image(img, _classifier(args))
    blobs = extract_blobs(labels, 20 if args.min_blob_area is None else args.min_blob_area)
    annotated = render_labels(labels, blobs)
    prefix = args.out_prefix
    save_ppm(annotated, f"{prefix}_labels.ppm", args.format.upper())

    params = _planner(args)
    lines = [REPORT_HEADER]
    code = EXIT_OK
    try:
        obs = scene_from_blobs(blobs, args.frame_id)
    except DetectionError:
        missing = tuple(
            role for role, cls in (("robot", 1), ("target", 2)) if not any(b.color == cls for b in blobs)
        )
        present = {b.color: b.centroid for b in reversed(blobs)}
        lines += format_report(None, None, args.frame_id, missing, present.get(1), present.get(2))
        code = EXIT_DETECTION
    else:
        report = build_report(obs, gm)
        # without a calibration the planner works in pixel units
        if gm is not None:
            robot = tuple(gm.to_floor(obs.robot.centroid))
            goal = tuple(gm.to_floor(obs.target.centroid))
            obstacles = perceived_obstacles(obs, gm)
        else:
            robot, goal, obstacles = obs.robot.centroid, obs.target.centroid, _pixel_obstacles(obs)
        try:
            _, cmd = plan(RobotPose(robot, args.heading), goal, obstacles, params)
        except NoAdmissibleWaypoint as exc:
            cmd = MotionCommand.stop()
            lines += format_report(report, cmd)
            lines.append(f"PLANNER {exc}")
        else:
            lines += format_report(report, cmd)
    text = "\n".join(lines) + "\n"
    Path(f"{prefix}_report.txt").write_text(text)
    sys.stdout.write(text)
    return code


def _load_config(args) -> SimConfig | None:
    try:
        cfg = read_config(Path(args.config).read_text())
    except (ConfigError, OSError) as exc:
        _err(f"{args.config}: {exc}")
        return None
    noise = cfg.noise if args.seed is None else replace(cfg.noise, seed=args.seed)
    return replace(
        cfg,
        noise=noise,
        planner=_planner(args, cfg.planner),
        classifier=_classifier(args, cfg.classifier),
        min_blob_area=cfg.min_blob_area if args.min_blob_area is None else args.min_blob_area,
    )


def format_trajectory(log) -> str:
    lines = [REPORT_HEADER, "# STEP lines: floor coordinates in cm, heading in degrees"]
    for s in log.steps:
        lines += format_report(s.report, s.command)
        wp = "NONE" if s.waypoint is None else f"{_f(s.waypoint[0])} {_f(s.waypoint[1])}"
        lines.append(
            f"STEP {s.frame_id} TRUE {_f(s.true_position[0])} {_f(s.true_position[1])} {_f(s.true_heading)}"
            f" PERCEIVED {_f(s.perceived_position[0])} {_f(s.perceived_position[1])}"
            f" WAYPOINT {wp} COLLISION {int(s.collided)}"
        )
    if log.status == "no_waypoint":
        lines.append(f"PLANNER {log.message}")
    if log.status == "detection_failure":
        lines.append(f"DETECTION {log.message}")
    fs = log.final_state
    lines.append(f"FINAL {_f(fs.position[0])} {_f(fs.position[1])} {_f(fs.heading)} COLLISION {int(log.collided)}")
    lines.append(f"STATUS {log.status} COMMANDS {log.n_commands}")
    return "\n".join(lines) + "\n"


def exit_code_for(log) -> int:
    if log.status == "detection_failure":
        return EXIT_DETECTION
    if log.collided:
        return EXIT_COLLISION
    if log.status == "goal":
        return EXIT_OK
    return EXIT_STEP_LIMIT


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    if cfg is None:
        return EXIT_PARSE
    max_steps = cfg.max_steps if args.max_steps is None else args.max_steps
    log = run_closed_loop(cfg.arena, cfg.camera, cfg.planner, cfg.noise, max_steps,
                          cfg.classifier, cfg.min_blob_area)
    prefix = args.out_prefix
    text = format_trajectory(log)
    Path(f"{prefix}_trajectory.txt").write_text(text)
    if log.last_labels is not None:
        save_ppm(render_labels(log.last_labels, log.last_blobs), f"{prefix}_final.ppm", args.format.upper())
    print(text.splitlines()[-1])
    return exit_code_for(log)


def cmd_render(args) -> int:
    cfg = _load_config(args)
    if cfg is None:
        return EXIT_PARSE
    try:
        img, truth = render_arena(cfg.arena, cfg.camera, cfg.noise, args.frame_id)
    except RenderError as exc:
        _err(str(exc))
        return EXIT_DEGENERATE
    save_ppm(img, args.out_image, args.format.upper())
    print(f"ROBOT {_f(truth.robot_pixel[0])} {_f(truth.robot_pixel[1])}")
    print(f"TARGET {_f(truth.target_pixel[0])} {_f(truth.target_pixel[1])}")
    for k, c in enumerate(truth.obstacle_pixel):
        print(f"OBST {k} {_f(c[0])} {_f(c[1])}")
    return EXIT_OK


def cmd_synth_corners(args) -> int:
    extra = []
    if args.floor_from:
        try:
            cfg = read_config(Path(args.floor_from).read_text())
        except (ConfigError, OSError) as exc:
            _err(f"{args.floor_from}: {exc}")
            return EXIT_PARSE
        cam: CameraSpec = cfg.camera
        K, width, height = cam.intrinsics, cam.width, cam.height
        extra = [cam.pose]
    else:
        K = cal.CameraIntrinsics(args.fx, args.fy, args.skew, args.cx, args.cy)
        width, height = args.width, args.height
    board = BoardSpec(args.squares_x, args.squares_y, args.square_size)
    seed = 0 if args.seed is None else args.seed
    try:
        views, _ = calibration_views(K, args.views, args.noise, seed, width, height, board, extra)
    except (RenderError, ValueError) as exc:
        _err(str(exc))
        return EXIT_DEGENERATE
    Path(args.out_file).write_text(cal.write_correspondences(views))
    if extra:
        print(f"floor view {views[-1].view_id}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the parse-error code rather than argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robonav", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="planar calibration from a correspondence file")
    p.add_argument("corr_file")
    p.add_argument("out_file")
    p.add_argument("--floor-view", type=int, help="view id of the board lying on the arena floor")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("analyze", help="segment one PPM frame and write the distance report")
    p.add_argument("image")
    p.add_argument("calib", nargs="?", help="calibration file (enables cm distances)")
    p.add_argument("--out-prefix", "-o", default="frame")
    p.add_argument("--heading", type=float, default=0.0, help="robot heading, degrees (image axes)")
    p.add_argument("--frame-id", type=int, default=0)
    _common_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="closed-loop run against the synthetic renderer")
    p.add_argument("config")
    p.add_argument("--out-prefix", "-o", default="sim")
    p.add_argument("--max-steps", type=int)
    _common_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="render one synthetic arena frame from a config")
    p.add_argument("config")
    p.add_argument("out_image")
    p.add_argument("--frame-id", type=int, default=0)
    _common_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("synth-corners", help="write a synthetic checkerboard correspondence file")
    p.add_argument("out_file")
    p.add_argument("--views", type=int, default=20)
    p.add_argument("--noise", type=float, default=0.0, help="corner noise sigma, px")
    p.add_argument("--seed", type=int)
    p.add_argument("--fx", type=float, default=800.0)
    p.add_argument("--fy", type=float, default=780.0)
    p.add_argument("--skew", type=float, default=0.5)
    p.add_argument("--cx", type=float, default=320.0)
    p.add_argument("--cy", type=float, default=240.0)
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=480)
    p.add_argument("--squares-x", type=int, default=14)
    p.add_argument("--squares-y", type=int, default=13)
    p.add_argument("--square-size", type=float, default=3.0)
    p.add_argument("--floor-from", help="sim config whose camera also views the board on the floor")
    p.set_defaults(func=cmd_synth_corners)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "margin"):
        # reject out-of-range flags before touching any file
        try:
            _classifier(args)
            _planner(args)
        except ValueError as exc:
            _err(str(exc))
            return EXIT_PARSE
        if args.min_blob_area is not None and args.min_blob_area < 1:
            _err("--min-blob-area must be at least 1")
            return EXIT_PARSE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
